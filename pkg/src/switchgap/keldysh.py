"""Transformed Keldysh machinery: drift/diffusion tensors, conserved density,
time-reversed parametrization, detailed-balance (curl) checks, the closed-form
potential with branch-cut handling, and the switching-rate prediction.

Conventions.  Phase-space coordinates are X = (b_cl, b_cl_bar) and momenta
P = (b_q_bar, -b_q).  The b_bar variables are independent complex coordinates
(analytic continuation); physical evaluation points set b_cl_bar = conj(b_cl)
and b_q = b_q_bar = 0.  On the deformed integration contour the momenta obey
b_q_bar = -conj(b_q), which is encoded by the substitution bt_q = i*b_q used
for the 8-real-component embedding.

The conserved density is quadratic in the momenta,

    density = P.A(X) + P.D(X).P  (- dephasing part, also quadratic in P),

with the drift A and diffusion D entire in X.  For dephasing (kappa_phi > 0)
the dynamical density acquires

    -kappa_phi/2 * [ (P1*X1 - P2*X2)^2 + P1*X1 + P2*X2 ],

which preserves density(X, P=0) = 0 and reproduces the noise-free fixed
points at +/-sqrt(alpha0_sq - kappa_phi/(2*kappa2)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchPoint, NotBistable, SingularDiffusion, ValidationError
from .model import SystemParams, derive_coeffs
from . import meanfield

CUT_NEG_IMAG = "negative_imag"   # branch cut on {i*t : t <= 0}, the documented default
CUT_NEG_REAL = "negative_real"   # principal log, for diagnostics

BRANCH_POINT_TOL = 1e-12
SINGULAR_DIFFUSION_TOL = 1e-12
CONFLUENT_TOL = 1e-9


@dataclass(frozen=True)
class PhaseSpaceState:
    """The four complex Keldysh coordinates on the deformed contour."""

    b_cl: complex
    b_cl_bar: complex
    b_q: complex
    b_q_bar: complex

    @classmethod
    def from_meanfield(cls, z: complex) -> "PhaseSpaceState":
        """Physical boundary point: conjugate coordinates, vanishing momenta."""
        return cls(complex(z), complex(np.conj(z)), 0j, 0j)

    @property
    def coords(self):
        return (self.b_cl, self.b_cl_bar)

    @property
    def momenta(self):
        """Canonical momenta P = (b_q_bar, -b_q)."""
        return (self.b_q_bar, -self.b_q)

    def to_tilde8(self) -> np.ndarray:
        """Real 8-vector in the tilde variables bt_q = i*b_q, bt_q_bar = i*b_q_bar."""
        bt_q = 1j * self.b_q
        bt_qb = 1j * self.b_q_bar
        return np.array([
            self.b_cl.real, self.b_cl.imag,
            self.b_cl_bar.real, self.b_cl_bar.imag,
            bt_q.real, bt_q.imag,
            bt_qb.real, bt_qb.imag,
        ])

    @classmethod
    def from_tilde8(cls, y) -> "PhaseSpaceState":
        y = np.asarray(y, dtype=float)
        bt_q = complex(y[4], y[5])
        bt_qb = complex(y[6], y[7])
        return cls(
            b_cl=complex(y[0], y[1]),
            b_cl_bar=complex(y[2], y[3]),
            b_q=-1j * bt_q,
            b_q_bar=-1j * bt_qb,
        )

    def slice_residual(self) -> float:
        """Distance from the physical contour slice (0 on it)."""
        return max(abs(self.b_cl_bar - np.conj(self.b_cl)),
                   abs(self.b_q_bar + np.conj(self.b_q)))

    def conj_slice(self) -> "PhaseSpaceState":
        """Antiholomorphic image; fixed points of this map lie on the slice."""
        return PhaseSpaceState(
            b_cl=np.conj(self.b_cl_bar), b_cl_bar=np.conj(self.b_cl),
            b_q=-np.conj(self.b_q_bar), b_q_bar=-np.conj(self.b_q))


@dataclass(frozen=True)
class DriftDiffusion:
    """Drift 2-vector (A, Abar) and symmetric diffusion 2x2 matrix."""

    a_vec: np.ndarray
    d_mat: np.ndarray

    @property
    def d(self):
        return self.d_mat[0, 0]

    @property
    def d_bar(self):
        return self.d_mat[1, 1]


def _htrs_tensors(params: SystemParams, x1: complex, x2: complex):
    c = derive_coeffs(params)
    l1, l2, l3 = params.lambda1, params.effective_lambda2(), params.lambda3
    d = 1j * c.k2 / 2 * x1 * x1 - 1j * l2 - 1j * l3 * x1
    d_bar = -1j * np.conj(c.k2) / 2 * x2 * x2 + 1j * np.conj(l2) + 1j * np.conj(l3) * x2
    a = 2 * x2 * d - 1j * c.k1 * x1 - 1j * np.conj(l3) * x1 * x1 - 1j * l1
    a_bar = 2 * x1 * d_bar + 1j * np.conj(c.k1) * x2 + 1j * l3 * x2 * x2 + 1j * np.conj(l1)
    return a, a_bar, d, d_bar


def drift_diffusion(params: SystemParams, x) -> DriftDiffusion:
    """Drift and diffusion tensors at coordinates x = (b_cl, b_cl_bar).

    For kappa_phi = 0 the diffusion is diagonal.  For kappa_phi > 0 the
    dephasing contributions used by the detailed-balance checkers are added:
    drift X_i*(1/2 - X1*X2) and constant off-diagonal diffusion 1/2 (each
    times kappa_phi).
    """
    x1, x2 = complex(x[0]), complex(x[1])
    a, a_bar, d, d_bar = _htrs_tensors(params, x1, x2)
    a_vec = np.array([a, a_bar], dtype=complex)
    d_mat = np.array([[d, 0j], [0j, d_bar]], dtype=complex)
    kphi = params.kappa_phi
    if kphi > 0:
        common = 0.5 - x1 * x2
        a_vec = a_vec + kphi * np.array([x1 * common, x2 * common])
        d_mat = d_mat + kphi * np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    return DriftDiffusion(a_vec=a_vec, d_mat=d_mat)


def lindbladian_density(params: SystemParams, state: PhaseSpaceState) -> complex:
    """Conserved density (effective Hamiltonian) at a phase-space point."""
    return density_with_scale(params, state)[0]


def density_with_scale(params: SystemParams, state: PhaseSpaceState):
    """Density value together with the sum of term magnitudes (drift scale)."""
    x1, x2 = state.coords
    p1, p2 = state.momenta
    a, a_bar, d, d_bar = _htrs_tensors(params, x1, x2)
    terms = [p1 * a, p2 * a_bar, p1 * p1 * d, p2 * p2 * d_bar]
    kphi = params.kappa_phi
    if kphi > 0:
        m = p1 * x1 - p2 * x2
        terms += [-kphi / 2 * m * m, -kphi / 2 * (p1 * x1 + p2 * x2)]
    value = sum(terms)
    scale = sum(abs(t) for t in terms)
    return value, scale


def tr_parametrization(params: SystemParams, x):
    """Momenta (b_q, b_q_bar) of the time-reversed manifold at coordinates x.

    Equals P = -D^{-1} A componentwise; fails with SingularDiffusion on the
    z_+/- locus where the diffusion degenerates.
    """
    params.require_htrs("tr_parametrization")
    x1, x2 = complex(x[0]), complex(x[1])
    c = derive_coeffs(params, require_k2=True)
    l1, l2, l3 = params.lambda1, params.effective_lambda2(), params.lambda3
    _, _, d, d_bar = _htrs_tensors(params, x1, x2)
    if min(abs(d), abs(d_bar)) < SINGULAR_DIFFUSION_TOL:
        raise SingularDiffusion(
            f"diffusion ~ 0 at x=({x1}, {x2}): |D|={abs(d):.2e}, |Dbar|={abs(d_bar):.2e}")
    den_q = np.conj(c.k2) * x2 * x2 - 2 * np.conj(l2) - 2 * np.conj(l3) * x2
    den_qb = c.k2 * x1 * x1 - 2 * l2 - 2 * l3 * x1
    b_q = 2 * x1 - (2 * np.conj(c.k1) * x2 + 2 * l3 * x2 * x2 + 2 * np.conj(l1)) / den_q
    b_q_bar = -2 * x2 + (2 * c.k1 * x1 + 2 * np.conj(l3) * x1 * x1 + 2 * l1) / den_qb
    return b_q, b_q_bar


def tr_state(params: SystemParams, x) -> PhaseSpaceState:
    """Phase-space point on the time-reversed manifold above coordinates x."""
    b_q, b_q_bar = tr_parametrization(params, x)
    return PhaseSpaceState(b_cl=complex(x[0]), b_cl_bar=complex(x[1]),
                           b_q=b_q, b_q_bar=b_q_bar)


# -- detailed-balance (curl) checks -------------------------------------------

ANSATZ_ZPRIME = "ansatz_Zprime"
FOKKER_PLANCK_Z = "fokker_planck_Z"


@dataclass(frozen=True)
class CurlReport:
    which: str
    max_curl: float
    passed: bool
    n_evaluated: int
    n_skipped: int
    partial_12: complex   # d(W_1)/d(X_2) of W = D^{-1} A at the last sample
    partial_21: complex


def _z_field(params: SystemParams, which, x1, x2):
    dd = drift_diffusion(params, (x1, x2))
    det = dd.d_mat[0, 0] * dd.d_mat[1, 1] - dd.d_mat[0, 1] * dd.d_mat[1, 0]
    if abs(det) < SINGULAR_DIFFUSION_TOL ** 2:
        raise SingularDiffusion("diffusion matrix singular")
    dinv = np.array([[dd.d_mat[1, 1], -dd.d_mat[0, 1]],
                     [-dd.d_mat[1, 0], dd.d_mat[0, 0]]]) / det
    w = dinv @ dd.a_vec
    if which == ANSATZ_ZPRIME:
        return -w
    if which == FOKKER_PLANCK_Z:
        c = derive_coeffs(params)
        l3 = params.lambda3
        div_d = np.array([1j * c.k2 * x1 - 1j * l3,
                          -1j * np.conj(c.k2) * x2 + 1j * np.conj(l3)])
        return -w + dinv @ div_d
    raise ValidationError(f"unknown condition {which!r}")


def check_curl_condition(params: SystemParams, which: str, sample_box: float = 1.5,
                         n_samples: int = 200, seed: int = 0) -> CurlReport:
    """Finite-difference curl check of Z' = -D^{-1}A (or the Fokker-Planck Z).

    Samples (b_cl, b_cl_bar) as two independent complex variables uniformly
    in a square box, differentiates holomorphically by central differences
    with step h = 1e-5*(1+|x|), and passes when max |curl| < 1e-6.  Points
    within 1e-4 of the singular z_+/- locus are skipped and reported.
    """
    rng = np.random.default_rng(seed)
    try:
        coeffs = potential_coeffs(params)
        sing1 = [coeffs.z_plus, coeffs.z_minus]
    except ValidationError:
        sing1 = []
    sing2 = [np.conj(s) for s in sing1]
    n_eval = 0
    n_skip = 0
    max_curl = 0.0
    p12 = p21 = 0j
    for _ in range(n_samples):
        x1 = complex(*rng.uniform(-sample_box, sample_box, 2))
        x2 = complex(*rng.uniform(-sample_box, sample_box, 2))
        h1 = 1e-5 * (1 + abs(x1))
        h2 = 1e-5 * (1 + abs(x2))
        skip_d = max(1e-4, 10 * max(h1, h2))
        if (any(abs(x1 - s) < skip_d for s in sing1)
                or any(abs(x2 - s) < skip_d for s in sing2)):
            n_skip += 1
            continue
        try:
            zp_p = _z_field(params, which, x1 + h1, x2)
            zp_m = _z_field(params, which, x1 - h1, x2)
            zq_p = _z_field(params, which, x1, x2 + h2)
            zq_m = _z_field(params, which, x1, x2 - h2)
        except SingularDiffusion:
            n_skip += 1
            continue
        d1_z2 = (zp_p[1] - zp_m[1]) / (2 * h1)
        d2_z1 = (zq_p[0] - zq_m[0]) / (2 * h2)
        curl = d1_z2 - d2_z1
        n_eval += 1
        if abs(curl) > max_curl:
            max_curl = abs(curl)
        # sign-flipped cross partials; for the ansatz condition these are the
        # partials of D^{-1} A (equal to 2 across the HTRS family)
        p12, p21 = -d2_z1, -d1_z2
    if n_eval == 0:
        raise SingularDiffusion("all curl samples fell on the singular locus")
    return CurlReport(which=which, max_curl=max_curl, passed=max_curl < 1e-6,
                      n_evaluated=n_eval, n_skipped=n_skip,
                      partial_12=p12, partial_21=p21)


# -- closed-form potential -----------------------------------------------------


@dataclass(frozen=True)
class PotentialCoeffs:
    """Roots and partial-fraction data of the potential's rational gradient."""

    z_plus: complex
    z_minus: complex
    a_coef: complex
    b_coef: complex
    confluent: bool
    c_plus: complex | None = None
    c_minus: complex | None = None


def potential_coeffs(params: SystemParams) -> PotentialCoeffs:
    """Branch points z_+/- and partial-fraction coefficients of the potential."""
    c = derive_coeffs(params, require_k2=True)
    l1, l2, l3 = params.lambda1, params.effective_lambda2(), params.lambda3
    disc = np.sqrt(complex(l3 * l3 + 2 * l2 * c.k2))
    z_plus = (l3 + disc) / c.k2
    z_minus = (l3 - disc) / c.k2
    a_coef = -2 * c.k1 - 4 * abs(l3) ** 2 / c.k2
    b_coef = -2 * l1 - 4 * np.conj(l3) * l2 / c.k2
    confluent = abs(z_plus - z_minus) < CONFLUENT_TOL * (1 + abs(z_plus))
    if confluent:
        return PotentialCoeffs(z_plus=z_plus, z_minus=z_minus, a_coef=a_coef,
                               b_coef=b_coef, confluent=True)
    c_plus = (a_coef * z_plus + b_coef) / (z_plus - z_minus)
    c_minus = (a_coef * z_minus + b_coef) / (z_minus - z_plus)
    return PotentialCoeffs(z_plus=z_plus, z_minus=z_minus, a_coef=a_coef,
                           b_coef=b_coef, confluent=False,
                           c_plus=c_plus, c_minus=c_minus)


def _log_cut(w, cut: str):
    """Complex log with the branch cut rotated onto the chosen half-line."""
    if cut == CUT_NEG_IMAG:
        # cut on {i*t : t <= 0}; arg in (-pi/2, 3*pi/2]
        return np.log(-1j * w) + 1j * np.pi / 2
    if cut == CUT_NEG_REAL:
        return np.log(w)
    raise ValidationError(f"unknown branch cut {cut!r}")


def potential_gradient_g(params: SystemParams, z: complex) -> complex:
    """The dz-coefficient g of the potential differential dPsi = g dz + g* dz*."""
    params.require_htrs("potential_gradient_g")
    c = derive_coeffs(params, require_k2=True)
    l1, l2, l3 = params.lambda1, params.effective_lambda2(), params.lambda3
    den = c.k2 * z * z - 2 * l2 - 2 * l3 * z
    return -(2 * c.k1 * z + 2 * np.conj(l3) * z * z + 2 * l1) / den


def potential_phi(params: SystemParams, z: complex, cut: str = CUT_NEG_IMAG) -> float:
    """Closed-form potential whose differences give the switching exponent.

    Only differences are physically meaningful; no additive normalization is
    applied.  Branch cuts of the complex logs run along {i*t : t <= 0} from
    each branch point (the documented default).
    """
    params.require_htrs("potential_phi")
    pc = potential_coeffs(params)
    z = complex(z)
    c = derive_coeffs(params)
    l3 = params.lambda3
    base = 2 * abs(z) ** 2 + 2 * np.real(-2 * np.conj(l3) * z / c.k2)
    if pc.confluent:
        z0 = (pc.z_plus + pc.z_minus) / 2
        log_coef = pc.a_coef / c.k2
        pole_coef = (pc.a_coef * z0 + pc.b_coef) / c.k2
        if abs(z - z0) < BRANCH_POINT_TOL and (log_coef != 0 or pole_coef != 0):
            raise BranchPoint(f"z={z} at the confluent branch point {z0}")
        val = 0j
        if log_coef != 0:
            val += log_coef * _log_cut(z - z0, cut)
        if pole_coef != 0:
            val -= pole_coef / (z - z0)
        return base + 2 * np.real(val)
    val = 0j
    for zb, coef in ((pc.z_plus, pc.c_plus), (pc.z_minus, pc.c_minus)):
        if coef == 0:
            # the log term is absent; z may sit on the root harmlessly
            continue
        if abs(z - zb) < BRANCH_POINT_TOL:
            raise BranchPoint(f"z={z} at branch point {zb}")
        val += (coef / c.k2) * _log_cut(z - zb, cut)
    return base + 2 * np.real(val)


def _log_coefficients(params: SystemParams):
    """(branch point, log coefficient) pairs of the potential, zeros dropped."""
    pc = potential_coeffs(params)
    c = derive_coeffs(params)
    if pc.confluent:
        z0 = (pc.z_plus + pc.z_minus) / 2
        pairs = [(z0, pc.a_coef / c.k2)]
    else:
        pairs = [(pc.z_plus, pc.c_plus / c.k2), (pc.z_minus, pc.c_minus / c.k2)]
    return [(z, coef) for z, coef in pairs if coef != 0]


# -- path-aware action ---------------------------------------------------------


def _signed_ray_crossings(path: np.ndarray, anchor: complex, cut: str) -> int:
    """Signed crossings (counterclockwise positive) of a branch-cut ray."""
    if cut == CUT_NEG_IMAG:
        # ray {anchor - i*s, s > 0}: ccw = crossing with increasing Re below anchor
        u = path.real - anchor.real
        v = path.imag - anchor.imag
    else:
        # ray {anchor - s, s > 0}: ccw = crossing with increasing Im left of anchor;
        # same test after rotating the plane by -90 degrees
        u = path.imag - anchor.imag
        v = -(path.real - anchor.real)
    n = 0
    for k in range(len(path) - 1):
        if (u[k] < 0) != (u[k + 1] < 0):
            t = u[k] / (u[k] - u[k + 1])
            v_c = v[k] + t * (v[k + 1] - v[k])
            if v_c < 0:
                n += 1 if u[k + 1] > u[k] else -1
    return n


def _relaxation_path(params: SystemParams, z_from: complex, z_to: complex,
                     rtol: float = 1e-10, t_max: float = 1e5):
    """Mean-field relaxation path from the unstable point toward a target well.

    Returns (path array, accumulated potential difference along it) where the
    accumulated quantity integrates dPhi = (2 conj(z) + g) dz + c.c. exactly
    along the flow, independent of any branch-cut choice.
    """
    _, eigs = meanfield.classify_stability(params, z_from)
    fz, fzb = meanfield._f_wirtinger(params, z_from)
    jac = meanfield._real_jacobian(-1j * fz, -1j * fzb)
    w, v = np.linalg.eig(jac)
    iu = int(np.argmax(w.real))
    if w[iu].real <= 0:
        raise ValidationError(f"{z_from} has no unstable mean-field direction")
    direction = v[:, iu].real
    direction = direction / np.linalg.norm(direction)
    eps = 1e-7 * (1 + abs(z_from))

    def rhs(t, y):
        z = complex(y[0], y[1])
        dz = meanfield.meanfield_rhs(params, z)
        g = potential_gradient_g(params, z)
        dphi = 2 * np.real((2 * np.conj(z) + g) * dz)
        return [dz.real, dz.imag, dphi]

    def arrived(t, y):
        return abs(complex(y[0], y[1]) - z_to) - 1e-9 * (1 + abs(z_to))
    arrived.terminal = True
    arrived.direction = -1

    # terminate once the flow has settled anywhere (covers the branch that
    # relaxes into the other well and would otherwise idle until t_max)
    speed_floor = 1e-12 * abs(w[iu].real) * (1 + abs(z_from) + abs(z_to))

    def settled(t, y):
        dz = meanfield.meanfield_rhs(params, complex(y[0], y[1]))
        return abs(dz) - speed_floor
    settled.terminal = True
    settled.direction = -1

    best = None
    for sgn in (+1, -1):
        z0 = z_from + sgn * eps * complex(direction[0], direction[1])
        sol = solve_ivp(rhs, (0, t_max), [z0.real, z0.imag, 0.0], rtol=rtol,
                        atol=rtol * 1e-2, events=(arrived, settled),
                        dense_output=False, method="DOP853", max_step=t_max / 50)
        z_end = complex(sol.y[0, -1], sol.y[1, -1])
        dist = abs(z_end - z_to)
        if best is None or dist < best[0]:
            path = sol.y[0] + 1j * sol.y[1]
            best = (dist, path, sol.y[2, -1])
    dist, path, dphi = best
    if dist > 1e-3 * (1 + abs(z_to)):
        warnings.warn(
            f"relaxation from {z_from} did not reach {z_to} (ended {dist:.2e} away); "
            "branch-cut winding not corrected", stacklevel=3)
        return None, None
    return path, dphi


def action(params: SystemParams, from_fp: complex, to_unstable: complex,
           path_aware: bool = True, cut: str = CUT_NEG_IMAG,
           verify: bool = True) -> float:
    """Action exponent iS for switching from a stable point to the saddle.

    Evaluates the closed-form potential difference and, when ``path_aware``
    (the default), corrects it by the integer winding of the physical
    time-reversed path around the branch points, so the result equals the
    action accumulated along the actual extremal path for any branch-cut
    placement.  Warns when the result is positive (outside the bistable
    assumptions) and, with ``verify``, when the quadrature cross-check along
    the relaxation path disagrees.
    """
    params.require_htrs("action")
    if abs(complex(from_fp) - complex(to_unstable)) == 0:
        # telescoping: the exponent vanishes identically
        meanfield.classify_stability(params, from_fp)
        return 0.0
    lab_from, _ = meanfield.classify_stability(params, from_fp)
    lab_to, _ = meanfield.classify_stability(params, to_unstable)
    if lab_from != meanfield.STABLE:
        raise ValidationError(f"from_fp {from_fp} is not stable")
    if lab_to != meanfield.UNSTABLE:
        raise ValidationError(f"to_unstable {to_unstable} is not unstable")
    i_s = potential_phi(params, to_unstable, cut) - potential_phi(params, from_fp, cut)
    if path_aware:
        path, dphi_quad = _relaxation_path(params, to_unstable, from_fp)
        if path is not None:
            correction = 0.0
            for anchor, coef in _log_coefficients(params):
                n = _signed_ray_crossings(path, anchor, cut)
                # ccw crossing of the cut drops 2*pi*i from the single-valued log
                correction += n * 2 * np.real(2j * np.pi * coef)
            i_s -= correction
            if verify:
                # quadrature ran saddle -> well, so it approximates -iS
                mismatch = abs(-i_s - dphi_quad)
                if mismatch > 1e-3 * max(1.0, abs(i_s)):
                    warnings.warn(
                        f"action quadrature cross-check off by {mismatch:.2e} "
                        f"(closed form {i_s:.6f}, path integral {-dphi_quad:.6f})",
                        stacklevel=2)
    if i_s > 0:
        warnings.warn(f"positive switching exponent iS={i_s:.3g}: parameters look "
                      "outside the bistable regime", stacklevel=2)
    return float(i_s)


@dataclass(frozen=True)
class RateEstimate:
    """Per-direction switching exponents and rates plus the averaged gap.

    Direction 1 -> 2 leaves the larger-amplitude (bright) well.
    """

    is_1to2: float
    is_2to1: float
    prefactor: float
    gamma_1to2: float
    gamma_2to1: float
    gap: float

    @property
    def exponents(self):
        return (self.is_1to2, self.is_2to1)


def switching_rates(params: SystemParams, prefactor: float | None = None,
                    fps=None, path_aware: bool = True) -> RateEstimate:
    """Switching rates Gamma = prefactor * exp(iS) per direction and their mean."""
    params.require_htrs("switching_rates")
    if fps is None:
        fps = meanfield.fixed_points_general(params)
    if not fps.bistable:
        raise NotBistable(
            f"need 2 stable + 1 unstable well-separated fixed points, got "
            f"{len(fps.stable)} stable / {len(fps.unstable)} unstable")
    pref = 1.0 if prefactor is None else float(prefactor)
    z1, z2 = fps.stable[0].z, fps.stable[1].z
    zu = fps.unstable[0].z
    is12 = action(params, z1, zu, path_aware=path_aware)
    is21 = action(params, z2, zu, path_aware=path_aware)
    g12 = pref * np.exp(is12)
    g21 = pref * np.exp(is21)
    return RateEstimate(is_1to2=is12, is_2to1=is21, prefactor=pref,
                        gamma_1to2=g12, gamma_2to1=g21, gap=(g12 + g21) / 2)


def complexp_potential(params: SystemParams, z: complex, cut: str = CUT_NEG_IMAG) -> float:
    """Log-density of the steady-state complex-P function on the physical slice.

    Returns Phi(z) - ln|D(z) * Dbar(conj z)| (unnormalized); the diffusion
    correction is sub-leading relative to Phi for strong two-photon drive.
    """
    params.require_htrs("complexp_potential")
    z = complex(z)
    _, _, d, d_bar = _htrs_tensors(params, z, np.conj(z))
    if min(abs(d), abs(d_bar)) < SINGULAR_DIFFUSION_TOL:
        raise SingularDiffusion(f"diffusion ~ 0 at z={z}")
    return potential_phi(params, z, cut) - float(np.log(abs(d * d_bar)))
