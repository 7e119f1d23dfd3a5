import numpy as np
import pytest

from switchgap import model


@pytest.fixture
def kerr_preset():
    return model.kerr_oscillator(kappa1=1.0)


@pytest.fixture
def cat_ideal():
    """Pure two-photon cat, alpha0 = 2, no other terms."""
    return model.SystemParams(kappa2=1.0, alpha0_sq=4.0)


@pytest.fixture
def cat_preset():
    return model.dissipative_cat(alpha0=2.0)


@pytest.fixture
def dephased_preset():
    return model.dephased_cat(alpha0_sq=4.0, kappa_phi=0.4)


def random_htrs_params(rng, with_lambda3=True):
    """A random member of the hidden-TRS family with a healthy two-photon drive."""
    l2 = complex(*rng.uniform(-3, 3, 2))
    while abs(l2) < 0.5:
        l2 = complex(*rng.uniform(-3, 3, 2))
    return model.SystemParams(
        delta=rng.uniform(-0.5, 0.5),
        kerr=rng.uniform(-0.3, 0.3),
        kappa1=rng.uniform(0, 0.1),
        kappa2=rng.uniform(0.5, 1.5),
        lambda1=complex(*rng.uniform(-0.3, 0.3, 2)),
        lambda2=l2,
        lambda3=complex(*rng.uniform(-0.2, 0.2, 2)) if with_lambda3 else 0j,
    )


def random_bistable_kerr(rng):
    """Random driven Kerr oscillator drawn until the discriminant is negative."""
    from switchgap import meanfield
    while True:
        p = model.SystemParams(
            delta=rng.uniform(1.0, 4.0),
            kerr=rng.uniform(0.05, 0.3),
            kappa1=rng.uniform(0.3, 1.5),
            kappa2=0.0,
            lambda1=model.complex_from_polar(rng.uniform(1.0, 8.0),
                                             rng.uniform(0, 2 * np.pi)),
        )
        bistable, _ = meanfield.bistability_region(p)
        if bistable:
            fps = meanfield.fixed_points_kerr(p)
            if fps.bistable:
                return p
