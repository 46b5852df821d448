import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from kakeyalab.bump import BUMP_INTEGRAL, BumpProfile, default_bump


@pytest.fixture(scope="module")
def bump():
    return default_bump()


def test_support_and_symmetry(bump):
    assert bump.phi(-0.5) == 0.0 and bump.phi(1.5) == 0.0
    x = np.random.default_rng(0).uniform(0, 1, 500)
    np.testing.assert_allclose(bump.phi(x), bump.phi(1 - x), rtol=1e-12, atol=0)


def test_unit_integral_against_adaptive_quadrature(bump):
    raw = quad(lambda x: np.exp(-1 / (x * (1 - x))), 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
    assert BUMP_INTEGRAL == pytest.approx(raw, rel=1e-11)
    assert quad(bump.phi, 0, 1, epsabs=1e-13, epsrel=1e-13)[0] == pytest.approx(1.0, abs=1e-9)


def test_phi_hat_at_zero(bump):
    assert abs(bump.phi_hat(0.0) - 1.0) <= 1e-9


def test_modulus_bounded_on_grid(bump):
    u = np.linspace(-1000, 1000, 100_001)
    assert np.max(np.abs(bump.phi_hat(u))) <= 1 + 1e-9


def test_rapid_decay(bump):
    assert bump.abs_phi_hat(1000.0) <= 1e-6
    consts = bump.decay_constants(lo=10.0, hi=1000.0)
    assert all(np.isfinite(v) and v > 0 for v in consts.values())


@given(st.floats(-4000, 4000))
def test_table_matches_direct_quadrature(u):
    bump = default_bump()
    assert abs(bump.phi_hat(u) - bump.phi_hat_direct(u)) <= 1e-8


@given(st.floats(0.0, 5000.0))
def test_conjugate_symmetry_exact(u):
    bump = default_bump()
    assert bump.phi_hat(-u) == np.conj(bump.phi_hat(u))


def test_direct_route_beyond_table(bump):
    u = bump.u_max * 1.5
    assert bump.amplitude(np.array([u]))[0] == bump.direct_amplitude(u)
    assert abs(bump.phi_hat(u)) <= 1e-13


def test_decay_dominance(bump):
    u = np.linspace(1.0, 1000.0, 20001)
    mag = bump.abs_phi_hat(u)
    for n, c in bump.decay_constants().items():
        assert np.all(mag <= c / u**n * (1 + 1e-12))


def test_refined_table_agrees():
    coarse = default_bump()
    fine = BumpProfile(u_max=256.0, h=1.0 / 128)
    u = np.linspace(0, 256, 3001)
    assert np.max(np.abs(coarse.phi_hat(u) - fine.phi_hat(u))) <= 1e-8
