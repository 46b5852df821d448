import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from kakeyalab.bump import default_bump
from kakeyalab.errors import BadParameters
from kakeyalab.kakeya_measure import (
    cone_measure_spec,
    mu_hat,
    mu_hat_envelope,
    sample,
    sphere_dual_mu_hat,
    sphere_surface_hat,
    split_bound,
    split_bound_terms,
)
from kakeyalab.orientation import (
    DiscreteOrientationMeasure,
    assign_translations,
    nondegenerate_sphere_measure,
    uniform_grassmannian_measure,
)


@pytest.fixture(scope="module")
def planes():
    from kakeyalab.orientation import uniform_grassmannian_measure as ugm
    return ugm(4, 2, 4, budget=20_000, seed=0)


@pytest.fixture(scope="module")
def lines3():
    return nondegenerate_sphere_measure(3, np.eye(3)[2], 0.6, 128, seed=1)


def test_zero_frequency(lines3):
    spec = assign_translations(lines3, "random_box", seed=2)
    assert abs(mu_hat(spec, np.zeros(3)) - 1) <= 1e-9
    assert mu_hat_envelope(spec, np.zeros(3)) == pytest.approx(1, abs=1e-9)


def test_single_atom_collapses_to_phi_hat():
    m = DiscreteOrientationMeasure(np.eye(3)[None, :1, :], np.array([1.0]))
    spec = assign_translations(m, "zero")
    for u in (0.3, 7.0, -40.0):
        assert mu_hat(spec, [u, 0, 0]) == default_bump().phi_hat(u)


def test_factorization_against_cube_quadrature(planes):
    # oracle: integrate exp(-2 pi i xi.(t + r1 x1 + r2 x2)) phi(r1) phi(r2) over the unit square
    spec = assign_translations(planes, "random_box", seed=3)
    bump = default_bump()
    r, w = np.polynomial.legendre.leggauss(200)
    r, w = (r + 1) / 2, w / 2
    wr = w * bump.phi(r)
    xi = np.array([3.0, -2.0, 1.5, 0.5])
    total = 0j
    for b, t, mass in zip(planes.bases, spec.translations, planes.masses):
        u1, u2 = b @ xi
        f1 = wr @ np.exp(-2j * np.pi * u1 * r)
        f2 = wr @ np.exp(-2j * np.pi * u2 * r)
        total += mass * np.exp(-2j * np.pi * t @ xi) * f1 * f2
    assert abs(mu_hat(spec, xi) - total) <= 1e-8


@given(st.integers(0, 2**31), st.sampled_from(["zero", "random_box"]))
def test_envelope_dominates(seed, strategy):
    m = uniform_grassmannian_measure(2, 1, 32, budget=5000, seed=0)
    spec = assign_translations(m, strategy, seed=seed)
    xi = np.random.default_rng(seed).normal(scale=30, size=(64, 2))
    env = mu_hat_envelope(spec, xi)
    assert np.all(np.abs(mu_hat(spec, xi)) <= env + 1e-9)
    assert np.all(env <= 1 + 1e-12)


def test_conjugate_symmetry(lines3):
    spec = assign_translations(lines3, "random_box", seed=5)
    xi = np.random.default_rng(0).normal(scale=20, size=(50, 3))
    np.testing.assert_allclose(mu_hat(spec, -xi), np.conj(mu_hat(spec, xi)), rtol=0, atol=1e-15)


def test_envelope_translation_invariant(lines3):
    xi = np.random.default_rng(1).normal(scale=20, size=(100, 3))
    ref = mu_hat_envelope(assign_translations(lines3, "zero"), xi)
    for s in range(5):
        other = mu_hat_envelope(assign_translations(lines3, "random_box", seed=s, side=3.0), xi)
        assert np.array_equal(ref, other)


def test_batch_equals_single(lines3):
    spec = assign_translations(lines3, "random_box", seed=6)
    xi = np.random.default_rng(2).normal(scale=10, size=(4, 3))
    batch = mu_hat(spec, xi)
    assert all(abs(batch[i] - mu_hat(spec, xi[i])) <= 1e-15 for i in range(4))
    s = sample(spec, xi[0])
    assert abs(s.value - batch[0]) <= 1e-15 and abs(s.value) <= s.envelope + 1e-12


def test_split_bound_example():
    assert split_bound(1.0, 0.5, 16.0) == pytest.approx(0.5, abs=1e-15)


@given(st.floats(0.01, 0.99), st.floats(0.01, 4.0), st.floats(1.001, 1e6))
def test_split_terms_equal(alpha, beta, xi):
    a, b = split_bound_terms(beta, alpha, xi)
    assert abs(a - b) <= 1e-12 * max(a, b)
    assert a == pytest.approx(xi ** (-alpha * beta), rel=1e-12)


def test_split_bound_rejects():
    for args in [(1.0, 1.0, 4.0), (0.0, 0.5, 4.0), (1.0, 0.5, 1.0)]:
        with pytest.raises(BadParameters):
            split_bound(*args)


def test_circle_surface_matches_bessel():
    for R in (3.0, 17.5, 200.0):
        val = sphere_surface_hat(2, [R, 0.0])
        assert abs(val - special.j0(2 * np.pi * R)) <= 1e-10


def test_sphere_surface_3d():
    R = 5.3
    val = sphere_surface_hat(3, [0, 0, R], n_theta=4096)
    assert abs(val - np.sinc(2 * R)) <= 1e-3


def test_dual_sphere_zero_and_modulus():
    centers = lambda r: np.outer(r, [0.3, -0.2])  # noqa: E731
    assert abs(sphere_dual_mu_hat(2, centers, [0.0, 0.0]) - 1) <= 1e-6
    assert abs(sphere_dual_mu_hat(2, None, [0.0, 0.0]) - 1) <= 1e-6
    xi = np.random.default_rng(0).normal(scale=20, size=(10, 2))
    assert np.all(np.abs(sphere_dual_mu_hat(2, centers, xi)) <= 1 + 1e-6)


def test_dual_sphere_origin_routes_agree():
    # zero drift through the quadrature route equals the exact phi_hat route
    zero = lambda r: np.zeros((len(r), 2))  # noqa: E731
    for xi in ([4.0, 1.0], [0.0, 30.0], [-50.0, 20.0]):
        assert abs(sphere_dual_mu_hat(2, zero, xi) - sphere_dual_mu_hat(2, None, xi)) <= 1e-8


def test_dual_sphere_origin_against_radial_density():
    # x_r = 0 gives density phi(|x|)/(2 pi |x|); its transform is a Hankel integral
    bump = default_bump()
    r, w = np.polynomial.legendre.leggauss(400)
    r, w = (r + 1) / 2, w / 2
    for R in (4.0, 16.0):
        exact = w @ (bump.phi(r) * special.j0(2 * np.pi * R * r))
        assert abs(sphere_dual_mu_hat(2, None, [R, 0.0]) - exact) <= 1e-9


def test_cone_geometry():
    spec = cone_measure_spec(3, 256)
    dirs = spec.orientation.bases[:, 0, :]
    np.testing.assert_allclose(dirs[:, 2], math.sqrt(2) / 2, atol=1e-12)
    pts = spec.translations[:, None, :] + np.linspace(0, 1, 9)[None, :, None] * dirs[:, None, :]
    np.testing.assert_allclose(pts[..., 2], np.linalg.norm(pts[..., :2], axis=-1), atol=1e-9)
