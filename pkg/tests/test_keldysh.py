import warnings

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from switchgap import keldysh, meanfield, model
from switchgap.errors import (BranchPoint, NotBistable, SingularDiffusion,
                              ValidationError)
from switchgap.keldysh import PhaseSpaceState
from conftest import random_htrs_params


# -- independent oracle: density by direct contour substitution -----------------

def density_contour_oracle(p: model.SystemParams, s: PhaseSpaceState) -> complex:
    """Second code path for the conserved density.

    Substitutes the two-branch fields (alpha_plus = b_cl, beta_plus = b_cl_bar
    + b_q_bar, alpha_minus = b_cl - b_q, beta_minus = b_cl_bar) into the
    normal-ordered symbols of the Hamiltonian and dissipators.
    """
    l2 = p.effective_lambda2()
    ap, bp = s.b_cl, s.b_cl_bar + s.b_q_bar
    am, bm = s.b_cl - s.b_q, s.b_cl_bar

    def h(b, a):
        return (p.delta * b * a - p.kerr / 2 * b * b * a * a
                + p.lambda1 * b + np.conj(p.lambda1) * a
                + l2 * b * b + np.conj(l2) * a * a
                + p.lambda3 * b * b * a + np.conj(p.lambda3) * b * a * a)

    val = -1j * (h(bp, ap) - h(bm, am))
    val += p.kappa1 * (ap * bm - 0.5 * bp * ap - 0.5 * bm * am)
    val += p.kappa2 * (ap ** 2 * bm ** 2 - 0.5 * bp ** 2 * ap ** 2
                       - 0.5 * bm ** 2 * am ** 2)
    if p.kappa_phi:
        u, v = bp * ap, bm * am
        val += p.kappa_phi * (u * v - 0.5 * (bp ** 2 * ap ** 2 + u)
                              - 0.5 * (bm ** 2 * am ** 2 + v)
                              + s.b_cl * s.b_cl_bar)
    return val


def random_state(rng, scale=1.5):
    return PhaseSpaceState(*(complex(*rng.normal(0, scale, 2)) for _ in range(4)))


def test_density_zero_at_vanishing_momenta():
    rng = np.random.default_rng(0)
    for p in (model.dissipative_cat(alpha0=2.0),
              model.kerr_oscillator(),
              model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4)):
        for _ in range(200):
            x1, x2 = complex(*rng.normal(0, 2, 2)), complex(*rng.normal(0, 2, 2))
            s = PhaseSpaceState(x1, x2, 0j, 0j)
            value, scale = keldysh.density_with_scale(p, s)
            assert abs(value) <= 1e-12 * max(scale, 1.0)


def test_density_zero_on_tr_manifold():
    rng = np.random.default_rng(1)
    p = model.dissipative_cat(alpha0=2.0, lambda3=0.05)
    n_done = 0
    while n_done < 300:
        x = (complex(*rng.normal(0, 2, 2)), complex(*rng.normal(0, 2, 2)))
        try:
            s = keldysh.tr_state(p, x)
        except SingularDiffusion:
            continue
        value, scale = keldysh.density_with_scale(p, s)
        assert abs(value) <= 1e-10 * max(scale, 1.0)
        n_done += 1


def test_density_matches_contour_oracle():
    rng = np.random.default_rng(2)
    params = [model.dissipative_cat(alpha0=2.0),
              model.kerr_oscillator(),
              model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4),
              model.SystemParams(delta=0.3, kerr=0.1, kappa1=0.2, kappa2=1.0,
                                 lambda1=0.4 - 0.1j, lambda2=1.5j,
                                 lambda3=0.2 + 0.1j, kappa_phi=0.3)]
    for p in params:
        for _ in range(100):
            s = random_state(rng)
            a = keldysh.lindbladian_density(p, s)
            b = density_contour_oracle(p, s)
            assert abs(a - b) < 1e-10 * (1 + abs(a))


def test_density_specific_point_against_oracle():
    p = model.SystemParams(kappa2=1.0, lambda2=2j)
    s = PhaseSpaceState(1.0 + 0j, 1.0 + 0j, 0.1 + 0j, 0.1 + 0j)
    value = keldysh.lindbladian_density(p, s)
    oracle = density_contour_oracle(p, s)
    assert value == pytest.approx(oracle, abs=1e-12)


# -- drift/diffusion -------------------------------------------------------------

def test_drift_matches_meanfield_flow_on_slice():
    # independent formulas: A(z, conj z) must equal d(alpha)/dt of meanfield
    rng = np.random.default_rng(3)
    for p in (model.dissipative_cat(alpha0=2.0, lambda3=0.1),
              model.kerr_oscillator()):
        for _ in range(50):
            z = complex(*rng.normal(0, 2, 2))
            dd = keldysh.drift_diffusion(p, (z, np.conj(z)))
            assert dd.a_vec[0] == pytest.approx(meanfield.meanfield_rhs(p, z),
                                                rel=1e-12, abs=1e-12)
            assert dd.a_vec[1] == pytest.approx(np.conj(dd.a_vec[0]),
                                                rel=1e-12, abs=1e-12)


def test_drift_diffusion_htrs_identities():
    rng = np.random.default_rng(4)
    p = model.SystemParams(delta=0.2, kerr=0.1, kappa1=0.3, kappa2=1.0,
                           lambda1=0.5, lambda2=1j, lambda3=0.2j)
    c = model.derive_coeffs(p)
    for _ in range(50):
        x1, x2 = complex(*rng.normal(0, 2, 2)), complex(*rng.normal(0, 2, 2))
        dd = keldysh.drift_diffusion(p, (x1, x2))
        d_expect = 1j * c.k2 * x1 ** 2 / 2 - 1j * p.lambda2 - 1j * p.lambda3 * x1
        dbar_expect = (-1j * np.conj(c.k2) * x2 ** 2 / 2 + 1j * np.conj(p.lambda2)
                       + 1j * np.conj(p.lambda3) * x2)
        assert dd.d == pytest.approx(d_expect, rel=1e-14, abs=1e-14)
        assert dd.d_bar == pytest.approx(dbar_expect, rel=1e-14, abs=1e-14)
        abar_expect = (2 * x1 * dd.d_bar + 1j * np.conj(c.k1) * x2
                       + 1j * p.lambda3 * x2 ** 2 + 1j * np.conj(p.lambda1))
        a_expect = (2 * x2 * dd.d - 1j * c.k1 * x1
                    - 1j * np.conj(p.lambda3) * x1 ** 2 - 1j * p.lambda1)
        assert dd.a_vec[1] == pytest.approx(abar_expect, rel=1e-14, abs=1e-14)
        assert dd.a_vec[0] == pytest.approx(a_expect, rel=1e-14, abs=1e-14)
        assert dd.d_mat[0, 1] == 0


def test_drift_diffusion_simple_cases():
    # pure loss: no diffusion, drift -i K1 b_cl with K1 = -i kappa1/2
    p = model.SystemParams(kappa1=0.4, kappa2=1e-12)
    dd = keldysh.drift_diffusion(p, (1.3 + 0.2j, 0.5j))
    assert abs(dd.d) < 1e-12 and abs(dd.d_bar) < 1e-12
    assert dd.a_vec[0] == pytest.approx(-0.2 * (1.3 + 0.2j), rel=1e-9)
    # cat: D = i kappa2 b_cl^2 / 2 - i Lambda2
    cat = model.dissipative_cat(alpha0=2.0)
    dd = keldysh.drift_diffusion(cat, (1.0 + 0j, 1.0 + 0j))
    assert dd.d == pytest.approx(1j / 2 * 1j - 2j * 1j, rel=1e-14)


def test_drift_diffusion_dephasing_tensors():
    # kappa_phi-only model: off-diagonal 1/2 and drift X_i (1/2 - X1 X2)
    p = model.SystemParams(kappa_phi=1.0)
    x1, x2 = 0.7 + 0.1j, -0.3 + 0.4j
    dd = keldysh.drift_diffusion(p, (x1, x2))
    assert dd.d_mat[0, 1] == pytest.approx(0.5)
    assert dd.d_mat[1, 0] == pytest.approx(0.5)
    assert dd.a_vec[0] == pytest.approx(x1 * (0.5 - x1 * x2), rel=1e-14)
    assert dd.a_vec[1] == pytest.approx(x2 * (0.5 - x1 * x2), rel=1e-14)
    # with kappa2 present the full symmetric 2x2 appears
    pd = model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4)
    dd = keldysh.drift_diffusion(pd, (x1, x2))
    assert dd.d_mat[0, 1] == pytest.approx(0.2)
    assert dd.d_mat[0, 0] != 0


# -- time-reversed parametrization ----------------------------------------------

def test_tr_vanishes_at_fixed_points():
    p = model.dissipative_cat(alpha0=2.0, lambda3=0.05)
    fps = meanfield.fixed_points_general(p)
    for q in fps.points:
        b_q, b_q_bar = keldysh.tr_parametrization(p, (q.z, np.conj(q.z)))
        assert abs(b_q) < 1e-8 and abs(b_q_bar) < 1e-8


def test_tr_cat_simple_value():
    # K1 = Lambda1 = Lambda3 = 0: b_q = 2 b_cl exactly
    p = model.SystemParams(kappa2=1.0, lambda2=2j)
    b_q, b_q_bar = keldysh.tr_parametrization(p, (1.0 + 0j, 1.0 + 0j))
    assert b_q == pytest.approx(2.0, abs=1e-14)
    assert b_q_bar == pytest.approx(-2.0, abs=1e-14)


def test_tr_equals_momentum_form():
    # Eq-style formulas against P = -D^{-1} A componentwise
    rng = np.random.default_rng(5)
    p = model.SystemParams(delta=0.2, kerr=0.05, kappa1=0.2, kappa2=1.0,
                           lambda1=0.3 - 0.2j, lambda2=1.7j, lambda3=0.1 + 0.05j)
    worst = 0.0
    n_done = 0
    while n_done < 1000:
        x = (complex(*rng.normal(0, 2, 2)), complex(*rng.normal(0, 2, 2)))
        try:
            b_q, b_q_bar = keldysh.tr_parametrization(p, x)
        except SingularDiffusion:
            continue
        dd = keldysh.drift_diffusion(p, x)
        p1 = -dd.a_vec[0] / dd.d
        p2 = -dd.a_vec[1] / dd.d_bar
        worst = max(worst, abs(b_q_bar - p1), abs(-b_q - p2))
        n_done += 1
    assert worst < 1e-12 * 100  # generous headroom for near-singular samples


def test_tr_rejects_singular_diffusion():
    p = model.SystemParams(kappa2=1.0, lambda2=2j)
    with pytest.raises(SingularDiffusion):
        keldysh.tr_parametrization(p, (2.0 + 0j, 0.3 + 0j))  # on the z_+ locus
    with pytest.raises(ValidationError):
        keldysh.tr_parametrization(model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.1),
                                   (1.0, 1.0))


# -- curl conditions -------------------------------------------------------------

def test_curl_htrs_passes_with_partials_two():
    p = model.dissipative_cat(alpha0=2.0, lambda3=0.1)
    rep = keldysh.check_curl_condition(p, keldysh.ANSATZ_ZPRIME, seed=1)
    assert rep.passed and rep.max_curl < 1e-6
    assert rep.partial_12 == pytest.approx(2.0, abs=1e-5)
    assert rep.partial_21 == pytest.approx(2.0, abs=1e-5)
    rep2 = keldysh.check_curl_condition(p, keldysh.FOKKER_PLANCK_Z, seed=1)
    assert rep2.passed


def test_curl_kappa_phi_only_passes():
    p = model.SystemParams(kappa_phi=0.7)
    rep = keldysh.check_curl_condition(p, keldysh.ANSATZ_ZPRIME, seed=2)
    assert rep.passed
    # both partials equal and proportional to (1/4 - X1 X2)
    assert rep.partial_12 == pytest.approx(rep.partial_21, abs=1e-6)
    rep2 = keldysh.check_curl_condition(p, keldysh.FOKKER_PLANCK_Z, seed=2)
    assert rep2.passed


def test_curl_dephased_cat_fails_both():
    p = model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4)
    for which in (keldysh.ANSATZ_ZPRIME, keldysh.FOKKER_PLANCK_Z):
        rep = keldysh.check_curl_condition(p, which, seed=3)
        assert not rep.passed
        assert rep.max_curl > 1e-2


# -- potential -------------------------------------------------------------------

def test_potential_coeffs_cat():
    p = model.SystemParams(kappa2=1.0, lambda2=2j)
    pc = keldysh.potential_coeffs(p)
    assert sorted([pc.z_plus, pc.z_minus], key=lambda z: z.real) \
        == pytest.approx([-2, 2], abs=1e-14)
    assert pc.a_coef == 0 and pc.b_coef == 0
    assert pc.c_plus == 0 and pc.c_minus == 0
    assert not pc.confluent


def test_potential_coeffs_kerr_confluent(kerr_preset):
    pc = keldysh.potential_coeffs(kerr_preset)
    assert pc.confluent
    assert abs(pc.z_plus) < 1e-12 and abs(pc.z_minus) < 1e-12


def test_potential_coeffs_lambda3_roots():
    p = model.SystemParams(kerr=1.0, kappa2=1e-300, lambda3=1.0)
    # K2 = 1 here is simpler to reason about; use K2 = i via kerr=0, kappa2=1
    p = model.SystemParams(kappa2=1.0, lambda3=1.0, lambda1=0.1)
    pc = keldysh.potential_coeffs(p)
    c = model.derive_coeffs(p)
    for z in (pc.z_plus, pc.z_minus):
        assert abs(c.k2 * z * z - 2 * p.lambda3 * z) < 1e-12
    roots = sorted([pc.z_plus, pc.z_minus], key=lambda z: abs(z))
    assert roots[0] == pytest.approx(0j, abs=1e-14)
    assert roots[1] == pytest.approx(-2j, abs=1e-12)


def test_potential_cat_values():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    assert keldysh.potential_phi(p, 2.0) == pytest.approx(8.0, abs=1e-12)
    assert keldysh.potential_phi(p, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_potential_branch_point_guard():
    p = model.dissipative_cat(alpha0=2.0)  # kappa1 > 0 so C_+- != 0
    pc = keldysh.potential_coeffs(p)
    with pytest.raises(BranchPoint):
        keldysh.potential_phi(p, pc.z_plus)


def fd_gradient(p, z, h=1e-6):
    """Finite-difference Wirtinger gradient (d/dz coefficient) of the potential."""
    fx = (keldysh.potential_phi(p, z + h) - keldysh.potential_phi(p, z - h)) / (2 * h)
    fy = (keldysh.potential_phi(p, z + 1j * h)
          - keldysh.potential_phi(p, z - 1j * h)) / (2 * h)
    return (fx - 1j * fy) / 2


def test_gradient_consistency_confluent(kerr_preset):
    # oracle: dPhi = (2 conj z + g) dz + c.c.; pins the confluent sign
    rng = np.random.default_rng(6)
    for _ in range(20):
        z = complex(rng.uniform(0.5, 3), rng.uniform(0.5, 3))  # away from the cut
        grad = fd_gradient(kerr_preset, z)
        expect = 2 * np.conj(z) + keldysh.potential_gradient_g(kerr_preset, z)
        assert abs(grad - expect) < 1e-6 * (1 + abs(expect))


def test_gradient_consistency_generic():
    rng = np.random.default_rng(7)
    p = model.dissipative_cat(alpha0=2.0, lambda3=0.1)
    pc = keldysh.potential_coeffs(p)
    n_done = 0
    while n_done < 20:
        z = complex(*rng.uniform(-3, 3, 2))
        # stay away from branch points and their downward cuts
        if any(abs(z - zb) < 0.3 or
               (abs(z.real - zb.real) < 0.05 and z.imag < zb.imag)
               for zb in (pc.z_plus, pc.z_minus)):
            continue
        grad = fd_gradient(p, z)
        expect = 2 * np.conj(z) + keldysh.potential_gradient_g(p, z)
        assert abs(grad - expect) < 1e-6 * (1 + abs(expect))
        n_done += 1


def line_integral_dphi(p, z_a, z_b):
    """Adaptive quadrature of dPhi = (2 conj z + g) dz + c.c. on a segment."""
    dz = z_b - z_a

    def integrand(t):
        z = z_a + t * dz
        return 2 * np.real((2 * np.conj(z) + keldysh.potential_gradient_g(p, z)) * dz)

    val, err = quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def test_potential_difference_equals_line_integral():
    # straight segment between the saddle and a well avoids the downward cuts
    p = model.dissipative_cat(alpha0=2.0)
    fps = meanfield.fixed_points_general(p)
    z1 = fps.stable[0].z
    zu = fps.unstable[0].z
    quad_val = line_integral_dphi(p, z1, zu)
    closed = keldysh.potential_phi(p, zu) - keldysh.potential_phi(p, z1)
    assert abs(closed - quad_val) < 1e-8 * (1 + abs(closed))


def test_path_independence_homotopic_polylines():
    rng = np.random.default_rng(8)
    n_done = 0
    while n_done < 10:
        p = random_htrs_params(rng)
        pc = keldysh.potential_coeffs(p)
        branch = [pc.z_plus, pc.z_minus]
        z_a, z_b = complex(*rng.uniform(-3, 3, 2)), complex(*rng.uniform(-3, 3, 2))
        way = (z_a + z_b) / 2 + complex(*rng.uniform(-0.1, 0.1, 2))
        # keep far from branch points so both routes are safely homotopic
        pts = [z_a, z_b, way]
        if any(abs(w - zb) < 0.8 for w in pts for zb in branch):
            continue
        direct = line_integral_dphi(p, z_a, z_b)
        detour = line_integral_dphi(p, z_a, way) + line_integral_dphi(p, way, z_b)
        phi_mag = abs(keldysh.potential_phi(p, z_b, cut=keldysh.CUT_NEG_IMAG))
        assert abs(direct - detour) < 1e-8 * (1 + phi_mag)
        n_done += 1


# -- action and rates ------------------------------------------------------------

def test_action_cat_minus_eight():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        i_s = keldysh.action(p, 2.0 + 0j, 0j)
    assert i_s == pytest.approx(-8.0, abs=1e-12)


def test_action_degenerate_is_zero():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    assert keldysh.action(p, 0j, 0j) == 0.0


def test_action_kerr_two_directions(kerr_preset):
    fps = meanfield.fixed_points_kerr(kerr_preset)
    zu = fps.unstable[0].z
    is_bd = keldysh.action(kerr_preset, fps.bright.z, zu)
    is_db = keldysh.action(kerr_preset, fps.dim.z, zu)
    assert is_bd < 0 and is_db < 0
    assert abs(is_bd - is_db) > 0.5  # genuinely asymmetric wells


def test_action_kerr_winding_against_path_quadrature(kerr_preset):
    # independent oracle: relaxation path by separate integration, then
    # cumulative Simpson of the exact differential along it
    from scipy.integrate import simpson
    fps = meanfield.fixed_points_kerr(kerr_preset)
    zu = fps.unstable[0].z
    for target in (fps.bright.z, fps.dim.z):
        _, eigs = meanfield.classify_stability(kerr_preset, zu)
        fz, fzb = meanfield._f_wirtinger(kerr_preset, zu)
        jac = meanfield._real_jacobian(-1j * fz, -1j * fzb)
        w, v = np.linalg.eig(jac)
        direction = v[:, np.argmax(w.real)].real
        direction /= np.linalg.norm(direction)
        best = None
        for sgn in (1, -1):
            z0 = zu + sgn * 1e-8 * complex(*direction)
            sol = solve_ivp(
                lambda t, y: [u for zz in
                              [meanfield.meanfield_rhs(kerr_preset, complex(*y))]
                              for u in (zz.real, zz.imag)],
                (0, 120.0), [z0.real, z0.imag], rtol=1e-11, atol=1e-12,
                dense_output=True, method="DOP853")
            zend = complex(sol.y[0, -1], sol.y[1, -1])
            if best is None or abs(zend - target) < best[0]:
                best = (abs(zend - target), sol)
        assert best[0] < 1e-6
        ts = np.linspace(0, best[1].t[-1], 100001)
        zs = best[1].sol(ts)
        z = zs[0] + 1j * zs[1]
        gs = np.array([keldysh.potential_gradient_g(kerr_preset, zi) for zi in z])
        dz = np.gradient(z, ts)
        integrand = 2 * np.real((2 * np.conj(z) + gs) * dz)
        quad_val = simpson(integrand, x=ts)
        i_s = keldysh.action(kerr_preset, target, zu)
        assert i_s == pytest.approx(-quad_val, rel=2e-3, abs=2e-3)


def test_action_winding_correction_size(kerr_preset):
    # the fixed-cut evaluation differs from the path-aware action by exactly
    # one winding quantum for the bright well of the Kerr preset
    fps = meanfield.fixed_points_kerr(kerr_preset)
    zu = fps.unstable[0].z
    aware = keldysh.action(kerr_preset, fps.bright.z, zu, path_aware=True)
    fixed = keldysh.action(kerr_preset, fps.bright.z, zu, path_aware=False)
    c = model.derive_coeffs(kerr_preset)
    quantum = 2 * np.real(2j * np.pi * (-2 * c.k1 / c.k2))
    assert aware - fixed == pytest.approx(-quantum, rel=1e-12)


def test_switching_rates_cat():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rate = keldysh.switching_rates(p, prefactor=1.0)
    assert rate.gap == pytest.approx(np.exp(-8.0), rel=1e-10)
    assert rate.gamma_1to2 == pytest.approx(rate.gamma_2to1, rel=1e-10)
    # swapping directions leaves the averaged gap unchanged
    assert (rate.gamma_1to2 + rate.gamma_2to1) / 2 == rate.gap


def test_switching_rates_requires_bistable():
    p = model.SystemParams(delta=0.7, kappa1=0.3, kappa2=1.0)
    with pytest.raises(NotBistable):
        keldysh.switching_rates(p)


def test_rate_asymmetry_shrinks_with_drive():
    # parity-breaking cubic drive: relative asymmetry decreases with alpha0^2
    ratios = []
    for a0sq in (4.0, 16.0, 64.0):
        p = model.SystemParams(kappa2=1.0, alpha0_sq=a0sq, lambda3=0.1,
                               kappa1=0.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rate = keldysh.switching_rates(p)
        ratios.append(abs(rate.is_1to2 - rate.is_2to1)
                      / abs(rate.is_1to2 + rate.is_2to1) * 2)
    assert ratios[0] > ratios[1] > ratios[2]


def test_complexp_potential_cat_correction():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    rng = np.random.default_rng(9)
    for _ in range(20):
        z = complex(*rng.uniform(-1.5, 1.5, 2))
        if min(abs(z - 2), abs(z + 2)) < 0.2:
            continue
        val = keldysh.complexp_potential(p, z)
        phi = keldysh.potential_phi(p, z)
        expect = -np.log(abs((z ** 2 - 4) * (np.conj(z) ** 2 - 4) / 4))
        assert val - phi == pytest.approx(expect, rel=1e-10, abs=1e-10)


def test_complexp_correction_subleading():
    # diffusion correction grows ~ log(Lambda2) while Phi grows linearly
    corrections, phis = [], []
    for a0sq in (4.0, 16.0, 64.0):
        p = model.SystemParams(kappa2=1.0, alpha0_sq=a0sq)
        z = np.sqrt(a0sq) * 0.5
        phi = keldysh.potential_phi(p, z)
        corrections.append(abs(keldysh.complexp_potential(p, z) - phi))
        phis.append(abs(phi))
    assert corrections[2] / phis[2] < corrections[0] / phis[0]


def test_complexp_rejects_singular_points():
    p = model.SystemParams(kappa2=1.0, alpha0_sq=4.0)
    with pytest.raises(SingularDiffusion):
        keldysh.complexp_potential(p, 2.0 + 0j)


def test_htrs_only_operations_reject_dephasing():
    p = model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4)
    with pytest.raises(ValidationError):
        keldysh.potential_phi(p, 1.0)
    with pytest.raises(ValidationError):
        keldysh.switching_rates(p)
    with pytest.raises(ValidationError):
        keldysh.action(p, 1.0, 0.0)
