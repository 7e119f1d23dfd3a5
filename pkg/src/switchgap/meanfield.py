"""Fixed points of the mean-field equation and their stability.

The mean-field flow for the amplitude alpha reads

    i d(alpha)/dt = K1*alpha - K2*alpha*|alpha|^2
                    + Lambda1 + 2*Lambda2*conj(alpha)
                    + conj(Lambda3)*alpha^2 + 2*Lambda3*|alpha|^2

with K1 = delta - i*kappa1/2 and K2 = kerr + i*kappa2.  Fixed points are
found either by damped-Newton multistart (general case) or by the two
closed forms available for cat-stabilization and Kerr-oscillator parameter
sets.  The conjugate variable is the literal complex conjugate here; the
analytic continuation to independent coordinates lives in the keldysh
module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotAFixedPoint, ValidationError
from .model import SystemParams, derive_coeffs

RESIDUAL_TOL = 1e-10        # max |i d(alpha)/dt| at a reported fixed point
CLASSIFY_RESIDUAL_TOL = 1e-8
DEDUP_TOL = 1e-8
SEPARATION_TOL = 1e-3       # bistability requires pairwise separations above this

STABLE = "stable"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class FixedPoint:
    z: complex
    stability: str
    jacobian_eigs: tuple


@dataclass(frozen=True)
class FixedPointSet:
    points: tuple
    bistable: bool

    @property
    def stable(self):
        """Stable points ordered by |z| descending (bright first)."""
        pts = [p for p in self.points if p.stability == STABLE]
        return sorted(pts, key=lambda p: -abs(p.z))

    @property
    def unstable(self):
        return [p for p in self.points if p.stability == UNSTABLE]

    @property
    def bright(self):
        return self.stable[0]

    @property
    def dim(self):
        return self.stable[-1]


def meanfield_f(params: SystemParams, z: complex) -> complex:
    """Right-hand side of i d(alpha)/dt at alpha = z (frequency units)."""
    c = derive_coeffs(params)
    l2 = params.effective_lambda2()
    zb = np.conj(z)
    return (c.k1 * z - c.k2 * z * z * zb + params.lambda1 + 2 * l2 * zb
            + np.conj(params.lambda3) * z * z + 2 * params.lambda3 * z * zb)


def meanfield_rhs(params: SystemParams, z: complex) -> complex:
    """d(alpha)/dt of the mean-field flow."""
    return -1j * meanfield_f(params, z)


def residual(params: SystemParams, z: complex) -> float:
    return abs(meanfield_f(params, z))


def _f_wirtinger(params: SystemParams, z: complex):
    c = derive_coeffs(params)
    l2 = params.effective_lambda2()
    zb = np.conj(z)
    fz = c.k1 - 2 * c.k2 * z * zb + 2 * np.conj(params.lambda3) * z + 2 * params.lambda3 * zb
    fzb = -c.k2 * z * z + 2 * l2 + 2 * params.lambda3 * z
    return fz, fzb


def _real_jacobian(hz: complex, hzb: complex) -> np.ndarray:
    """Real 2x2 Jacobian of h(z, conj z) in (Re z, Im z) coordinates."""
    return np.array([
        [np.real(hz + hzb), np.imag(hzb - hz)],
        [np.imag(hz + hzb), np.real(hz - hzb)],
    ])


def classify_stability(params: SystemParams, z: complex):
    """Stability of a fixed point from the linearized mean-field flow.

    Returns ``(label, (eig1, eig2))`` where the eigenvalues are those of the
    real 2x2 Jacobian of (Re alpha, Im alpha) -> d(alpha)/dt.
    """
    if residual(params, z) > CLASSIFY_RESIDUAL_TOL:
        raise NotAFixedPoint(
            f"residual {residual(params, z):.3e} at z={z} exceeds {CLASSIFY_RESIDUAL_TOL}")
    fz, fzb = _f_wirtinger(params, z)
    jac = _real_jacobian(-1j * fz, -1j * fzb)
    eigs = np.linalg.eigvals(jac)
    eigs = tuple(sorted(eigs, key=lambda w: (w.real, w.imag)))
    label = STABLE if all(w.real < 0 for w in eigs) else UNSTABLE
    return label, eigs


def _newton(params: SystemParams, z0: complex, max_steps: int = 50) -> complex | None:
    z = complex(z0)
    for _ in range(max_steps):
        f = meanfield_f(params, z)
        fz, fzb = _f_wirtinger(params, z)
        jac = _real_jacobian(fz, fzb)
        try:
            step = np.linalg.solve(jac, -np.array([f.real, f.imag]))
        except np.linalg.LinAlgError:
            return None
        # backtracking halving on |f|
        t = 1.0
        fnorm = abs(f)
        for _ in range(50):
            zt = z + t * (step[0] + 1j * step[1])
            if abs(meanfield_f(params, zt)) <= (1 - 0.5 * t) * fnorm or fnorm == 0:
                break
            t *= 0.5
        z = z + t * (step[0] + 1j * step[1])
        if np.hypot(*step) * t < 1e-13:
            return z
    return z if residual(params, z) < RESIDUAL_TOL else None


def _multistart_grid(params: SystemParams, n_angles: int, n_radii: int):
    c = derive_coeffs(params)
    l2 = params.effective_lambda2()
    r_max = 3.0 * max(
        abs(2 * l2 / c.k2) ** 0.5,
        abs(params.lambda1 / c.k2) ** (1 / 3),
        abs(c.k1 / c.k2) ** 0.5,
        1.0,
    )
    starts = [0j]
    for i in range(1, n_radii + 1):
        r = r_max * i / n_radii
        for j in range(n_angles):
            starts.append(r * np.exp(2j * np.pi * j / n_angles))
    return starts


def fixed_points_general(params: SystemParams, n_angles: int = 24, n_radii: int = 12,
                         dedup_tol: float = DEDUP_TOL,
                         separation_tol: float = SEPARATION_TOL) -> FixedPointSet:
    """All isolated mean-field fixed points by deterministic multistart Newton."""
    derive_coeffs(params, require_k2=True)
    roots = []
    for z0 in _multistart_grid(params, n_angles, n_radii):
        z = _newton(params, z0)
        if z is not None and residual(params, z) < RESIDUAL_TOL:
            roots.append(z)
    # deterministic merge order, then dedup
    roots.sort(key=lambda w: (round(w.real, 12), round(w.imag, 12)))
    merged = []
    for z in roots:
        if all(abs(z - m) > dedup_tol for m in merged):
            merged.append(z)
    points = []
    for z in merged:
        label, eigs = classify_stability(params, z)
        points.append(FixedPoint(z=z, stability=label, jacobian_eigs=eigs))
    _check_counts(params, points)
    return _make_set(points, separation_tol)


def _make_set(points, separation_tol) -> FixedPointSet:
    stable = [p for p in points if p.stability == STABLE]
    unstable = [p for p in points if p.stability == UNSTABLE]
    separated = all(
        abs(a.z - b.z) > separation_tol
        for i, a in enumerate(points) for b in points[i + 1:]
    )
    bistable = len(stable) == 2 and len(unstable) == 1 and separated
    return FixedPointSet(points=tuple(points), bistable=bistable)


def _check_counts(params: SystemParams, points):
    stable = sum(1 for p in points if p.stability == STABLE)
    if stable > 2 or len(points) > 3:
        warnings.warn(
            f"unexpected fixed-point structure: {stable} stable / {len(points)} total "
            "(covered regimes have at most 2 stable and 3 total)", stacklevel=3)
    if _is_kerr_case(params):
        expected = len(fixed_points_kerr(params).points)
        if len(points) < expected:
            raise NoConvergence(
                f"multistart found {len(points)} fixed points but the Kerr closed form "
                f"predicts {expected}")


def _is_kerr_case(params: SystemParams) -> bool:
    return (params.effective_lambda2() == 0 and params.lambda3 == 0
            and params.lambda1 != 0)


def fixed_points_cat_asymptotic(params: SystemParams):
    """Leading-order cat fixed points {0, +/-sqrt(2 L2/K2) + correction}.

    Valid for |2*Lambda2/K2| >> 1; warns below 4.  The correction term is the
    O(eps) shift from a cubic drive.
    """
    c = derive_coeffs(params, require_k2=True)
    l2 = params.effective_lambda2()
    if l2 == 0:
        raise ValidationError("cat asymptotics need a two-photon drive (lambda2/alpha0_sq)")
    ratio = 2 * l2 / c.k2
    if abs(ratio) < 4:
        warnings.warn(f"|2*Lambda2/K2| = {abs(ratio):.3g} < 4: asymptotic formula is crude",
                      stacklevel=2)
    psi2 = np.angle(ratio)
    amp = abs(ratio) ** 0.5 * np.exp(1j * psi2 / 2)
    shift = (2 * params.lambda3 + np.conj(params.lambda3) * np.exp(1j * psi2)) / (2 * c.k2)
    return [0j, amp + shift, -amp + shift]


def kerr_cubic_pq(params: SystemParams):
    """Depressed-cubic data (shift, p, q) for |z|^2 of the Kerr oscillator."""
    c = derive_coeffs(params, require_k2=True)
    k1sq = abs(c.k1) ** 2
    k2sq = abs(c.k2) ** 2
    s = 2 * np.real(np.conj(c.k1) * c.k2) / (3 * k2sq)
    p = k1sq / k2sq - 3 * s ** 2
    q = -2 * s ** 3 + s * k1sq / k2sq - abs(params.lambda1) ** 2 / k2sq
    return s, p, q


def bistability_region(params: SystemParams):
    """Sign and value of the cubic discriminant 4p^3 + 27q^2 (negative = bistable)."""
    _require_kerr_case(params)
    _, p, q = kerr_cubic_pq(params)
    margin = 4 * p ** 3 + 27 * q ** 2
    return margin < 0, margin


def _require_kerr_case(params: SystemParams):
    if not _is_kerr_case(params):
        raise ValidationError(
            "Kerr-oscillator closed form needs lambda2 = lambda3 = 0 and lambda1 != 0")


def fixed_points_kerr(params: SystemParams,
                      separation_tol: float = SEPARATION_TOL) -> FixedPointSet:
    """Closed-form fixed points of the driven Kerr oscillator.

    Solves the real cubic for R = |z|^2 (trigonometric form in the bistable
    regime, Cardano real root otherwise) and maps each admissible root back
    through z = Lambda1 / (R*K2 - K1).
    """
    _require_kerr_case(params)
    c = derive_coeffs(params, require_k2=True)
    s, p, q = kerr_cubic_pq(params)
    disc = 4 * p ** 3 + 27 * q ** 2
    if disc < 0:
        arg = np.clip(3 * q / (2 * p) * np.sqrt(-3 / p), -1.0, 1.0)
        rs = [s + 2 * np.sqrt(-p / 3) * np.cos(np.arccos(arg) / 3 + 2 * np.pi * k / 3)
              for k in range(3)]
    else:
        # monostable branch: single real root by Cardano
        half_q = -q / 2
        root = np.sqrt(q ** 2 / 4 + p ** 3 / 27)
        rs = [s + np.cbrt(half_q + root) + np.cbrt(half_q - root)]
    points = []
    for r in sorted(rs):
        if r < 0:
            continue
        z = params.lambda1 / (r * c.k2 - c.k1)
        label, eigs = classify_stability(params, z)
        points.append(FixedPoint(z=z, stability=label, jacobian_eigs=eigs))
    return _make_set(points, separation_tol)
