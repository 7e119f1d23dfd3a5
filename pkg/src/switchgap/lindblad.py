"""Ground-truth verification on a truncated Fock space.

Builds the vectorized generator with the column-stacking convention
vec(A rho B) = (B^T kron A) vec(rho), extracts the dissipative gap (slowest
nonzero decay rate) and the steady state, and validates the truncation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (DegenerateZeroModes, DimensionOverflow,
                     IterativeNoConvergence, ValidationError)
from .model import SystemParams
from . import meanfield

DENSE_MAX_N = 45
DEFAULT_DIM_CAP = 40_000      # cap on n_fock**2


def destroy(n_fock: int) -> sp.csr_matrix:
    """Truncated annihilation operator."""
    return sp.diags(np.sqrt(np.arange(1, n_fock, dtype=float)), 1,
                    format="csr", dtype=complex)


@dataclass(frozen=True)
class Superoperator:
    """Vectorized Lindbladian (column stacking) plus provenance."""

    n_fock: int
    matrix: sp.csc_matrix
    params_hash: str
    norm_scale: float = field(default=0.0)
    rate_scale: float = field(default=1.0)

    @property
    def dim(self) -> int:
        return self.n_fock ** 2

    def trace_vector(self) -> np.ndarray:
        """vec(I); annihilates the matrix from the left (trace preservation)."""
        return np.eye(self.n_fock, dtype=complex).reshape(-1, order="F")


@dataclass(frozen=True)
class SpectralSummary:
    gap: float
    gap_imag: float
    steady_state: np.ndarray
    n_zero_modes: int
    eigenvalues: np.ndarray | None = None
    method: str = "dense"


def hamiltonian(params: SystemParams, n_fock: int) -> sp.csr_matrix:
    """Hamiltonian on the truncated Fock space, in the Lambda2 form requested.

    When the parameter set carries alpha0_sq, the two-photon drive lives in
    the displaced dissipator instead and is omitted here.
    """
    a = destroy(n_fock)
    ad = a.conj().T
    h = params.delta * (ad @ a) - params.kerr / 2 * (ad @ ad @ a @ a)
    h = h + params.lambda1 * ad + np.conj(params.lambda1) * a
    h = h + params.lambda3 * (ad @ ad @ a) + np.conj(params.lambda3) * (ad @ a @ a)
    if params.alpha0_sq is None and params.lambda2 != 0:
        h = h + params.lambda2 * (ad @ ad) + np.conj(params.lambda2) * (a @ a)
    return h.tocsr()


def jump_operators(params: SystemParams, n_fock: int):
    """(rate, operator) pairs of the configured dissipators."""
    a = destroy(n_fock)
    eye = sp.identity(n_fock, format="csr", dtype=complex)
    jumps = []
    if params.kappa1 > 0:
        jumps.append((params.kappa1, a))
    if params.kappa2 > 0:
        if params.alpha0_sq is not None:
            jumps.append((params.kappa2, (a @ a - params.alpha0_sq * eye).tocsr()))
        else:
            jumps.append((params.kappa2, (a @ a).tocsr()))
    if params.kappa_phi > 0:
        jumps.append((params.kappa_phi, (a.conj().T @ a).tocsr()))
    return jumps


def _expected_amplitude_sq(params: SystemParams) -> float:
    try:
        fps = meanfield.fixed_points_general(params)
        return max((abs(p.z) ** 2 for p in fps.points), default=0.0)
    except Exception:
        a0 = params.alpha0_sq
        return abs(a0) if a0 is not None else 0.0


def build_lindbladian(params: SystemParams, n_fock: int,
                      dim_cap: int = DEFAULT_DIM_CAP) -> Superoperator:
    """Assemble -i[H, .] + sum_j kappa_j D[L_j] as a sparse matrix."""
    if n_fock < 8:
        raise ValidationError(f"n_fock must be >= 8, got {n_fock}")
    if n_fock ** 2 > dim_cap:
        raise DimensionOverflow(
            f"n_fock^2 = {n_fock ** 2} exceeds the cap {dim_cap}; raise dim_cap to override")
    amp_sq = _expected_amplitude_sq(params)
    if amp_sq >= n_fock / 2:
        warnings.warn(
            f"expected |alpha_ss|^2 ~ {amp_sq:.1f} is not well below n_fock={n_fock}; "
            "truncation may be unreliable", stacklevel=2)
    eye = sp.identity(n_fock, format="csr", dtype=complex)
    h = hamiltonian(params, n_fock)
    mat = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for rate, lj in jump_operators(params, n_fock):
        ldl = (lj.conj().T @ lj).tocsr()
        mat = mat + rate * (sp.kron(lj.conj(), lj)
                            - 0.5 * sp.kron(eye, ldl)
                            - 0.5 * sp.kron(ldl.T, eye))
    mat = mat.tocsc()
    norm_scale = spla.norm(mat, np.inf)
    rate_scale = max(params.kappa1, params.kappa2, params.kappa_phi,
                     abs(params.delta), abs(params.kerr), abs(params.lambda1),
                     abs(params.effective_lambda2()), abs(params.lambda3), 1e-6)
    return Superoperator(n_fock=n_fock, matrix=mat,
                         params_hash=params.hash(n_fock),
                         norm_scale=float(norm_scale), rate_scale=float(rate_scale))


def _hermitize_unit_trace(vec: np.ndarray, n: int) -> np.ndarray:
    rho = vec.reshape(n, n, order="F")
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr) < 1e-300:
        raise ValidationError("candidate steady state has (numerically) zero trace")
    return rho / tr


def dissipative_gap(superop: Superoperator, method: str = "dense",
                    n_eigs: int = 10, sigma_scale: float = 1e-3) -> SpectralSummary:
    """Slowest nonzero decay rate and the steady state.

    ``dense`` diagonalizes the full matrix (allowed up to N=45); ``iterative``
    shift-inverts about a small positive-real shift, which is spectrum-free,
    so the zero mode and the gap mode are the two eigenvalues nearest the
    shift.  The zero mode is identified as the eigenvalue of least modulus
    and excluded from the gap minimum.
    """
    n = superop.n_fock
    scale = superop.norm_scale
    if method == "dense":
        if n > DENSE_MAX_N:
            raise ValidationError(f"dense diagonalization limited to N <= {DENSE_MAX_N}")
        w, v = la.eig(superop.matrix.toarray())
        eigenvalues = w
    elif method == "iterative":
        # positive real shifts are spectrum-free for a Lindbladian
        sigma = sigma_scale * superop.rate_scale
        k = min(n_eigs, superop.dim - 2)
        v0 = np.ones(superop.dim)
        try:
            w, v = spla.eigs(superop.matrix, k=k, sigma=sigma, which="LM", v0=v0,
                             maxiter=5000, tol=0)
        except spla.ArpackNoConvergence as exc:
            raise IterativeNoConvergence(
                f"shift-invert Arnoldi did not converge ({exc})",
                residual=getattr(exc, "eigenvalues", None)) from exc
        eigenvalues = None
    else:
        raise ValidationError(f"unknown method {method!r}")

    i0 = int(np.argmin(np.abs(w)))
    lam0 = w[i0]
    # the zero mode is the least-modulus eigenvalue; a second one within the
    # numerical zero floor signals a degenerate steady manifold
    zero_floor = max(3 * abs(lam0), 1e-14 * max(scale, 1.0))
    n_zero = int(np.sum(np.abs(w) <= zero_floor))
    if n_zero > 1:
        raise DegenerateZeroModes(
            f"{n_zero} candidate zero modes (|lambda0|={abs(lam0):.2e})")
    others = np.delete(w, i0)
    decay = -others.real
    gap_idx = int(np.argmin(decay))
    gap = float(decay[gap_idx])
    gap_imag = float(others[gap_idx].imag)
    rho = _hermitize_unit_trace(np.asarray(v[:, i0]).ravel(), n)
    return SpectralSummary(gap=gap, gap_imag=gap_imag, steady_state=rho,
                           n_zero_modes=n_zero, eigenvalues=eigenvalues,
                           method=method)


def steady_state_moments(summary: SpectralSummary, orders) -> list:
    """Normally ordered moments <a^dag^p a^q> of the steady state.

    ``orders`` is an iterable of (p, q) integer pairs; the common one-liners
    accept the aliases "a" (0,1), "a2" (0,2), "n" (1,1).
    """
    rho = summary.steady_state
    n = rho.shape[0]
    a = destroy(n).toarray()
    ad = a.conj().T
    alias = {"a": (0, 1), "a2": (0, 2), "n": (1, 1)}
    out = []
    for order in orders:
        p, q = alias[order] if isinstance(order, str) else order
        op = np.linalg.matrix_power(ad, p) @ np.linalg.matrix_power(a, q)
        out.append(complex(np.trace(op @ rho)))
    return out


def well_populations(summary: SpectralSummary, z1: complex, z2: complex):
    """Steady-state weights of the two wells by a separating-quadrature projector.

    The phase plane is split along the perpendicular bisector of [z1, z2] via
    the quadrature operator measured along the line joining the wells; returns
    (p1, p2) with p1 the weight on the z1 side.
    """
    rho = summary.steady_state
    n = rho.shape[0]
    a = destroy(n).toarray()
    phase = np.exp(-1j * np.angle(complex(z1) - complex(z2)))
    quad = (a * phase + a.conj().T * np.conj(phase)) / 2
    mid = np.real((complex(z1) + complex(z2)) / 2 * phase)
    evals, evecs = np.linalg.eigh(quad)
    mask = evals > mid
    proj = evecs[:, mask] @ evecs[:, mask].conj().T
    p1 = float(np.real(np.trace(proj @ rho)))
    return p1, 1.0 - p1


def two_state_rates(summary: SpectralSummary, z1: complex, z2: complex):
    """Per-direction switching rates from the two-state Markov reduction.

    For a bistable system the slowest relaxation eigenvalue is the sum of the
    two switching rates while the steady-state well weights fix their ratio
    (stationarity of the reduced chain): Gamma_{1->2} = gap * p2 and
    Gamma_{2->1} = gap * p1.
    """
    p1, p2 = well_populations(summary, z1, z2)
    return summary.gap * p2, summary.gap * p1


@dataclass(frozen=True)
class TruncationReport:
    n_list: tuple
    gaps: tuple
    rel_changes: tuple
    converged: bool
    oscillating: bool

    @property
    def best_n(self) -> int:
        return self.n_list[-1]


def truncation_scan(params: SystemParams, n_list, method: str = "dense",
                    rel_tol: float = 1e-4) -> TruncationReport:
    """Gap versus Fock truncation; converged when the last relative change is small."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValidationError("n_list must be strictly increasing")
    gaps = []
    for n in n_list:
        summary = dissipative_gap(build_lindbladian(params, n), method=method)
        gaps.append(summary.gap)
    rel = tuple(abs(g2 - g1) / max(abs(g2), 1e-300)
                for g1, g2 in zip(gaps, gaps[1:]))
    converged = bool(rel) and rel[-1] < rel_tol
    oscillating = (len(rel) >= 2 and rel[-1] > rel_tol
                   and any(r < rel[-1] for r in rel[:-1]))
    if oscillating:
        warnings.warn(f"gap(N) not settling monotonically: changes {rel}", stacklevel=2)
    return TruncationReport(n_list=tuple(n_list), gaps=tuple(gaps),
                            rel_changes=rel, converged=converged,
                            oscillating=oscillating)


def auto_n_fock(params: SystemParams, n_max: int = DENSE_MAX_N, n_min: int = 10,
                method: str = "dense", rel_tol: float = 1e-4):
    """Scan increasing truncations until the gap converges; returns (N, report)."""
    amp_sq = _expected_amplitude_sq(params)
    start = int(np.ceil(amp_sq + 5 * np.sqrt(max(amp_sq, 1.0)) + 6))
    start = max(n_min, min(start, n_max))
    ns = [start]
    while ns[-1] + 4 <= n_max:
        ns.append(ns[-1] + 4)
        if len(ns) >= 3:
            break
    report = truncation_scan(params, ns, method=method, rel_tol=rel_tol)
    if not report.converged:
        warnings.warn(f"gap not converged by N={ns[-1]} (changes {report.rel_changes})",
                      stacklevel=2)
    return report.best_n, report
