"""Direct numerical solution of the saddle-point equations of motion.

The conserved-density flow is integrated in the 8-real-dimensional embedding
of (b_cl, b_cl_bar, bt_q, bt_q_bar) with bt_q = i*b_q, so that on the
physical contour the pairs (b_cl, b_cl_bar) and (bt_q, bt_q_bar) are complex
conjugates.  The contour slice is monitored, not enforced.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (DensityDriftExceeded, NoCandidate, NotAFixedPoint,
                     StepSizeUnderflow, ValidationError)
from .keldysh import PhaseSpaceState, density_with_scale
from .model import SystemParams, derive_coeffs
from . import meanfield

FIXED_POINT_TOL = 1e-8
DENSITY_DRIFT_BUDGET = 1e-6   # times the local density term scale
PAIRING_TOL = 1e-10


def _tensors_with_derivs(params: SystemParams, x1, x2):
    c = derive_coeffs(params)
    l1, l2, l3 = params.lambda1, params.effective_lambda2(), params.lambda3
    d = 1j * c.k2 / 2 * x1 * x1 - 1j * l2 - 1j * l3 * x1
    dp = 1j * c.k2 * x1 - 1j * l3
    d_bar = -1j * np.conj(c.k2) / 2 * x2 * x2 + 1j * np.conj(l2) + 1j * np.conj(l3) * x2
    dp_bar = -1j * np.conj(c.k2) * x2 + 1j * np.conj(l3)
    a = 2 * x2 * d - 1j * c.k1 * x1 - 1j * np.conj(l3) * x1 * x1 - 1j * l1
    a_bar = 2 * x1 * d_bar + 1j * np.conj(c.k1) * x2 + 1j * l3 * x2 * x2 + 1j * np.conj(l1)
    d1_a = 2 * x2 * dp - 1j * c.k1 - 2j * np.conj(l3) * x1
    d2_abar = 2 * x1 * dp_bar + 1j * np.conj(c.k1) + 2j * l3 * x2
    return c, (a, a_bar, d, d_bar, dp, dp_bar, d1_a, d2_abar)


def _is_dephased_cat_model(params: SystemParams) -> bool:
    return (params.delta == 0 and params.kerr == 0 and params.kappa1 == 0
            and params.lambda1 == 0 and params.lambda3 == 0 and params.kappa2 > 0)


def eom_rhs(params: SystemParams, state: PhaseSpaceState):
    """Hamilton's equations of the conserved density.

    Returns the four complex time derivatives (b_cl, b_cl_bar, b_q, b_q_bar).
    For the pure (kappa2, alpha0_sq, kappa_phi) model the explicit polynomial
    right-hand sides are used; they agree with the generic partials to
    machine precision.
    """
    if _is_dephased_cat_model(params):
        return _eom_rhs_dephased_cat(params, state)
    return _eom_rhs_generic(params, state)


def _eom_rhs_generic(params: SystemParams, state: PhaseSpaceState):
    x1, x2 = state.coords
    p1, p2 = state.momenta
    _, (a, a_bar, d, d_bar, dp, dp_bar, d1_a, d2_abar) = \
        _tensors_with_derivs(params, x1, x2)
    kphi = params.kappa_phi
    m = p1 * x1 - p2 * x2
    dx1 = a + 2 * p1 * d - kphi * (m * x1 + x1 / 2)
    dx2 = a_bar + 2 * p2 * d_bar + kphi * (m * x2 - x2 / 2)
    dp1 = -(p1 * d1_a + 2 * p2 * d_bar + p1 * p1 * dp) + kphi * (m * p1 + p1 / 2)
    dp2 = -(2 * p1 * d + p2 * d2_abar + p2 * p2 * dp_bar) - kphi * (m * p2 - p2 / 2)
    # state derivatives: b_q = -P2, b_q_bar = P1
    return (dx1, dx2, -dp2, dp1)


def _eom_rhs_dephased_cat(params: SystemParams, state: PhaseSpaceState):
    """Explicit right-hand sides for kappa2 D[a^2 - alpha0^2] + kappa_phi D[n]."""
    k2 = params.kappa2
    kphi = params.kappa_phi
    a0sq = -2j * params.effective_lambda2() / k2
    bc, bcb, bq, bqb = state.b_cl, state.b_cl_bar, state.b_q, state.b_q_bar
    d_bc = k2 * (bqb + bcb) * (a0sq - bc * bc) + kphi * bc * (-bqb * bc - bq * bcb - 0.5)
    d_bcb = k2 * (bc - bq) * (a0sq - bcb * bcb) + kphi * bcb * (bqb * bc + bcb * bq - 0.5)
    d_bq = k2 * (bqb * (a0sq - bc * bc) + 2 * bcb * bc * bq - bcb * bq * bq) \
        + kphi * (-bqb * bc * bq - bcb * bq * bq + bq / 2)
    d_bqb = k2 * (bqb * bqb * bc + 2 * bqb * bcb * bc + (a0sq - bcb * bcb) * bq) \
        + kphi * (bqb * bqb * bc + bqb * bcb * bq + bqb / 2)
    return (d_bc, d_bcb, d_bq, d_bqb)


def _rhs_real10(params: SystemParams):
    """Real RHS of the 8 embedded components plus the complex action integrand."""

    def rhs(t, y):
        state = PhaseSpaceState.from_tilde8(y[:8])
        d_bc, d_bcb, d_bq, d_bqb = eom_rhs(params, state)
        dt_q = 1j * d_bq
        dt_qb = 1j * d_bqb
        da = -state.b_q_bar * d_bc + state.b_q * d_bcb
        return [d_bc.real, d_bc.imag, d_bcb.real, d_bcb.imag,
                dt_q.real, dt_q.imag, dt_qb.real, dt_qb.imag,
                da.real, da.imag]

    return rhs


@dataclass(frozen=True)
class Trajectory:
    """A saddle-point trajectory with its conserved-density diagnostics."""

    times: np.ndarray
    states: tuple
    accumulated_action: float
    action_imag: float
    running_action: np.ndarray
    max_density_drift: float
    density_scale: float
    closest_approach: float
    closest_time: float
    slice_residual_max: float
    escaped: bool

    @property
    def b_cl_path(self) -> np.ndarray:
        return np.array([s.b_cl for s in self.states])


def _distance8(state: PhaseSpaceState, target: PhaseSpaceState) -> float:
    return float(np.linalg.norm(state.to_tilde8() - target.to_tilde8()))


ORIGIN = PhaseSpaceState(0j, 0j, 0j, 0j)


def integrate(params: SystemParams, initial: PhaseSpaceState, t_span, tol: float = 1e-9,
              n_samples: int = 800, target: PhaseSpaceState = ORIGIN,
              escape_radius: float | None = None,
              drift_budget: float = DENSITY_DRIFT_BUDGET,
              truncate_at_closest: bool = False) -> Trajectory:
    """Adaptive high-order integration of the saddle-point flow.

    Accumulates the action integral int(-b_q_bar db_cl + b_q db_cl_bar) with
    the same error control as the state, records the conserved-density drift,
    and measures the closest approach to ``target`` in the 8-real embedding.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValidationError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    y0 = np.concatenate([initial.to_tilde8(), [0.0, 0.0]])
    rhs = _rhs_real10(params)
    events = []
    if escape_radius is not None:
        def escape(t, y):
            return np.linalg.norm(y[:8]) - escape_radius
        escape.terminal = True
        escape.direction = 1
        events.append(escape)
    sol = solve_ivp(rhs, tuple(t_span), y0, method="DOP853", rtol=tol,
                    atol=tol * 1e-2, dense_output=True, events=events or None)
    if sol.status == -1:
        last = PhaseSpaceState.from_tilde8(sol.y[:8, -1])
        raise StepSizeUnderflow(f"integration failed: {sol.message}",
                                last_state=last, last_time=sol.t[-1])
    escaped = sol.status == 1
    t_end = sol.t[-1]
    ts = np.linspace(t_span[0], t_end, n_samples)
    ys = sol.sol(ts)
    states = [PhaseSpaceState.from_tilde8(ys[:8, i]) for i in range(len(ts))]

    dens = [density_with_scale(params, s) for s in states]
    values = np.array([d[0] for d in dens])
    scale = max(1.0, float(np.max([d[1] for d in dens])))
    drift = float(np.max(np.abs(values - values[0])))
    if drift > 100 * drift_budget * scale:
        raise DensityDriftExceeded(
            f"density drift {drift:.2e} exceeds 100x budget ({drift_budget:.1e} x scale "
            f"{scale:.2e}); integration not trustworthy")

    dists = np.array([_distance8(s, target) for s in states])
    i_min = int(np.argmin(dists))
    # refine the minimum on the dense output around the best sample
    t_lo = ts[max(i_min - 1, 0)]
    t_hi = ts[min(i_min + 1, len(ts) - 1)]
    t_fine = np.linspace(t_lo, t_hi, 64)
    y_fine = sol.sol(t_fine)
    d_fine = [
        _distance8(PhaseSpaceState.from_tilde8(y_fine[:8, i]), target)
        for i in range(len(t_fine))
    ]
    j_min = int(np.argmin(d_fine))
    closest = float(d_fine[j_min])
    t_closest = float(t_fine[j_min])

    if truncate_at_closest:
        ts = np.linspace(t_span[0], t_closest, n_samples)
        ys = sol.sol(ts)
        states = [PhaseSpaceState.from_tilde8(ys[:8, i]) for i in range(len(ts))]
    action_c = complex(ys[8, -1], ys[9, -1])
    slice_res = max(s.slice_residual() for s in states)
    return Trajectory(times=ts, states=tuple(states),
                      accumulated_action=float(action_c.real),
                      action_imag=float(action_c.imag),
                      running_action=ys[8].copy(),
                      max_density_drift=drift, density_scale=scale,
                      closest_approach=closest, closest_time=t_closest,
                      slice_residual_max=slice_res, escaped=escaped)


# -- saddle Jacobian -------------------------------------------------------------


@dataclass(frozen=True)
class SaddleJacobian:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    repulsive_values: np.ndarray
    repulsive_basis: np.ndarray  # columns are eigenvectors with Re(lambda) > 0
    fixed_point: PhaseSpaceState


def _jacobian_xp(params: SystemParams, state: PhaseSpaceState) -> np.ndarray:
    """Analytic Jacobian in (X1, X2, P1, P2) coordinates."""
    x1, x2 = state.coords
    p1, p2 = state.momenta
    c, (a, a_bar, d, d_bar, dp, dp_bar, d1_a, d2_abar) = \
        _tensors_with_derivs(params, x1, x2)
    dpp = 1j * c.k2               # D''
    dpp_bar = -1j * np.conj(c.k2)
    l3 = params.lambda3
    d11_a = 2 * x2 * dpp - 2j * np.conj(l3)
    d22_abar = 2 * x1 * dpp_bar + 2j * l3
    kphi = params.kappa_phi
    m = p1 * x1 - p2 * x2
    jac = np.zeros((4, 4), dtype=complex)
    # dX1dot/d(...)
    jac[0, 0] = d1_a + 2 * p1 * dp - kphi * (m + x1 * p1 + 0.5)
    jac[0, 1] = 2 * d + kphi * x1 * p2
    jac[0, 2] = 2 * d - kphi * x1 * x1
    jac[0, 3] = kphi * x1 * x2
    # dX2dot/d(...)
    jac[1, 0] = 2 * d_bar + kphi * x2 * p1
    jac[1, 1] = d2_abar + 2 * p2 * dp_bar + kphi * (m - x2 * p2 - 0.5)
    jac[1, 2] = kphi * x1 * x2
    jac[1, 3] = 2 * d_bar - kphi * x2 * x2
    # dP1dot/d(...)
    jac[2, 0] = -(p1 * d11_a + p1 * p1 * dpp) + kphi * p1 * p1
    jac[2, 1] = -(2 * p1 * dp + 2 * p2 * dp_bar) - kphi * p1 * p2
    jac[2, 2] = -(d1_a + 2 * p1 * dp) + kphi * (m + p1 * x1 + 0.5)
    jac[2, 3] = -2 * d_bar - kphi * p1 * x2
    # dP2dot/d(...)
    jac[3, 0] = -(2 * p1 * dp + 2 * p2 * dp_bar) - kphi * p1 * p2
    jac[3, 1] = -(p2 * d22_abar + p2 * p2 * dpp_bar) + kphi * p2 * p2
    jac[3, 2] = -2 * d - kphi * p2 * x1
    jac[3, 3] = -(d2_abar + 2 * p2 * dp_bar) - kphi * (m - p2 * x2 - 0.5)
    return jac


# (X1, X2, P1, P2) -> (b_cl, b_cl_bar, b_q, b_q_bar)
_T_STATE = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, -1],
    [0, 0, 1, 0],
], dtype=complex)
_T_STATE_INV = np.linalg.inv(_T_STATE)


def _jacobian_fd(params: SystemParams, state: PhaseSpaceState, h: float = 1e-6) -> np.ndarray:
    base = np.array([state.b_cl, state.b_cl_bar, state.b_q, state.b_q_bar])
    jac = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        for pert, sign in ((h, 1.0), (-h, -1.0)):
            v = base.copy()
            v[j] += pert
            f = eom_rhs(params, PhaseSpaceState(*v))
            jac[:, j] += sign * np.array(f) / (2 * h)
    return jac


def saddle_jacobian(params: SystemParams, fixed_point: PhaseSpaceState,
                    method: str = "analytic") -> SaddleJacobian:
    """Linearization of the saddle-point flow at a fixed point.

    The Jacobian is complex 4x4 in (b_cl, b_cl_bar, b_q, b_q_bar); its
    spectrum comes in (lambda, -lambda) pairs, and at a noise-free stable
    fixed point exactly two eigenvalues have positive real part.
    """
    res = np.linalg.norm(np.array(eom_rhs(params, fixed_point)))
    if res > FIXED_POINT_TOL:
        raise NotAFixedPoint(f"flow residual {res:.2e} exceeds {FIXED_POINT_TOL}")
    if method == "analytic":
        jac = _T_STATE @ _jacobian_xp(params, fixed_point) @ _T_STATE_INV
    elif method == "fd":
        jac = _jacobian_fd(params, fixed_point)
    else:
        raise ValidationError(f"unknown method {method!r}")
    evals, evecs = np.linalg.eig(jac)
    order = sorted(range(len(evals)), key=lambda i: (-evals[i].real, -evals[i].imag))
    evals = evals[order]
    evecs = evecs[:, order]
    mask = evals.real > 0
    return SaddleJacobian(matrix=jac, eigenvalues=evals,
                          repulsive_values=evals[mask],
                          repulsive_basis=evecs[:, mask],
                          fixed_point=fixed_point)


def _sigma_vec(v: np.ndarray) -> np.ndarray:
    """Tangent-space image of the contour-conjugation symmetry."""
    return np.array([np.conj(v[1]), np.conj(v[0]), -np.conj(v[3]), -np.conj(v[2])])


def _tangent_to_tilde8(v: np.ndarray) -> np.ndarray:
    t_q = 1j * v[2]
    t_qb = 1j * v[3]
    return np.array([v[0].real, v[0].imag, v[1].real, v[1].imag,
                     t_q.real, t_q.imag, t_qb.real, t_qb.imag])


def repulsive_plane_basis(jac: SaddleJacobian) -> np.ndarray:
    """Orthonormal real 8-vectors spanning the slice-compatible repulsive plane."""
    if jac.repulsive_basis.shape[1] == 0:
        raise ValidationError("fixed point has no repulsive directions")
    candidates = []
    for k in range(jac.repulsive_basis.shape[1]):
        v = jac.repulsive_basis[:, k]
        candidates.append(_tangent_to_tilde8(v + _sigma_vec(v)))
        candidates.append(_tangent_to_tilde8(1j * (v - _sigma_vec(v))))
    mat = np.array(candidates).T
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    if rank < 2:
        raise ValidationError("repulsive plane on the contour slice is not 2-dimensional")
    basis = u[:, :2]
    # deterministic sign: largest-magnitude component positive
    for j in range(2):
        i_big = int(np.argmax(np.abs(basis[:, j])))
        if basis[i_big, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


@dataclass(frozen=True)
class ShootResult:
    trajectory: Trajectory
    theta: float
    closest_approach: float
    from_fp: PhaseSpaceState
    basis: np.ndarray


def shoot_instanton(params: SystemParams, from_fp, eps: float = 1e-5,
                    n_theta: int = 720, refine_iters: int = 40,
                    t_max: float | None = None, tol: float = 1e-8,
                    final_tol: float = 1e-10,
                    target: PhaseSpaceState = ORIGIN,
                    acceptance_radius: float = 1e-2) -> ShootResult:
    """Sweep the repulsive plane for the trajectory passing closest to the saddle.

    Initializes at fp + eps*(cos(theta) v1 + sin(theta) v2) on a uniform theta
    grid, scores each integration by its closest approach to ``target``,
    refines the best angle by golden-section search, and returns the winner
    re-integrated at the tight tolerance and truncated at closest approach.
    """
    if isinstance(from_fp, (int, float, complex)):
        from_fp = PhaseSpaceState.from_meanfield(complex(from_fp))
    jac = saddle_jacobian(params, from_fp)
    basis = repulsive_plane_basis(jac)
    fp8 = from_fp.to_tilde8()
    eps_abs = eps * max(1.0, float(np.linalg.norm(fp8)))
    if t_max is None:
        rate = max(params.kappa2, params.kappa1, params.kappa_phi,
                   abs(params.delta), abs(params.kerr), 1e-3)
        t_max = 50.0 / rate
    a0 = np.sqrt(abs(params.effective_lambda2()) * 2 / max(params.kappa2, 1e-12)) \
        if params.kappa2 > 0 else abs(from_fp.b_cl)
    escape_radius = 10.0 * (1.0 + a0)

    def run(theta, run_tol, n_samples=400, truncate=False):
        y0 = fp8 + eps_abs * (np.cos(theta) * basis[:, 0] + np.sin(theta) * basis[:, 1])
        initial = PhaseSpaceState.from_tilde8(y0)
        return integrate(params, initial, (0.0, t_max), tol=run_tol,
                         n_samples=n_samples, target=target,
                         escape_radius=escape_radius, truncate_at_closest=truncate)

    best_theta = None
    best_score = np.inf
    for j in range(n_theta):
        theta = 2 * np.pi * j / n_theta
        try:
            traj = run(theta, tol)
        except (StepSizeUnderflow, DensityDriftExceeded):
            continue
        if traj.closest_approach < best_score:
            best_score = traj.closest_approach
            best_theta = theta

    if best_theta is None:
        raise NoCandidate("every shot integration failed", best_score=np.inf)

    # golden-section refinement around the best grid angle
    gr = (np.sqrt(5.0) - 1) / 2
    a = best_theta - 2 * np.pi / n_theta
    b = best_theta + 2 * np.pi / n_theta
    cache = {}

    def score(theta):
        if theta not in cache:
            try:
                cache[theta] = run(theta, tol).closest_approach
            except (StepSizeUnderflow, DensityDriftExceeded):
                cache[theta] = np.inf
        return cache[theta]

    c = b - gr * (b - a)
    d = a + gr * (b - a)
    for _ in range(refine_iters):
        if score(c) < score(d):
            b = d
        else:
            a = c
        c = b - gr * (b - a)
        d = a + gr * (b - a)
    theta_star = min(cache, key=cache.get) if cache else best_theta
    if score(theta_star) > best_score:
        theta_star = best_theta

    final = run(theta_star, final_tol, n_samples=2000, truncate=True)
    if final.closest_approach > acceptance_radius:
        raise NoCandidate(
            f"best trajectory only approaches the saddle to "
            f"{final.closest_approach:.3e} (> {acceptance_radius})",
            best_score=final.closest_approach, best_theta=theta_star)
    return ShootResult(trajectory=final, theta=float(theta_star % (2 * np.pi)),
                       closest_approach=final.closest_approach,
                       from_fp=from_fp, basis=basis)


def noise_free_relaxation(params: SystemParams, z_from: complex, z_to: complex,
                          rtol: float = 1e-10, n_samples: int = 800) -> np.ndarray:
    """Mean-field relaxation curve z(t) from near z_from to z_to (complex path)."""
    fz, fzb = meanfield._f_wirtinger(params, z_from)
    jac = meanfield._real_jacobian(-1j * fz, -1j * fzb)
    w, v = np.linalg.eig(jac)
    iu = int(np.argmax(w.real))
    if w[iu].real <= 0:
        raise ValidationError(f"{z_from} is not unstable under the mean-field flow")
    direction = v[:, iu].real
    direction /= np.linalg.norm(direction)
    eps = 1e-7 * (1 + abs(z_from))

    def rhs(t, y):
        dz = meanfield.meanfield_rhs(params, complex(y[0], y[1]))
        return [dz.real, dz.imag]

    def arrived(t, y):
        return abs(complex(y[0], y[1]) - z_to) - 1e-10 * (1 + abs(z_to))
    arrived.terminal = True
    arrived.direction = -1

    speed_floor = 1e-13 * abs(w[iu].real) * (1 + abs(z_from) + abs(z_to))

    def settled(t, y):
        dz = meanfield.meanfield_rhs(params, complex(y[0], y[1]))
        return abs(dz) - speed_floor
    settled.terminal = True
    settled.direction = -1

    best = None
    for sgn in (1, -1):
        z0 = z_from + sgn * eps * complex(*direction)
        sol = solve_ivp(rhs, (0, 1e5), [z0.real, z0.imag], rtol=rtol, atol=rtol,
                        events=(arrived, settled), dense_output=True,
                        method="DOP853")
        z_end = complex(sol.y[0, -1], sol.y[1, -1])
        if best is None or abs(z_end - z_to) < best[0]:
            ts = np.linspace(0, sol.t[-1], n_samples)
            ys = sol.sol(ts)
            best = (abs(z_end - z_to), ys[0] + 1j * ys[1])
    if best[0] > 1e-3 * (1 + abs(z_to)):
        warnings.warn(f"relaxation ended {best[0]:.2e} away from {z_to}", stacklevel=2)
    return best[1]


def curve_deviation(path_a: np.ndarray, path_b: np.ndarray) -> float:
    """Max over a of the min distance to b, for two complex curves."""
    pa = np.asarray(path_a)[:, None]
    pb = np.asarray(path_b)[None, :]
    return float(np.max(np.min(np.abs(pa - pb), axis=1)))
