import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kakeyalab.errors import GridBelowResolution, InsufficientGrid, ZeroFrequency
from kakeyalab.grassmannian import Frame, random_subspace
from kakeyalab.orientation import (
    hyperplane_family_measure,
    nondegenerate_sphere_measure,
    uniform_grassmannian_measure,
)
from kakeyalab.scaling import check_eta_grid, fit_beta, in_slab, slab_mass, worst_case_slab_mass

ETAS = [2.0**-j for j in range(3, 8)]


@pytest.fixture(scope="module")
def circle256():
    return uniform_grassmannian_measure(2, 1, 256, seed=0)


@pytest.fixture(scope="module")
def plane_lines():
    return hyperplane_family_measure(3, 1, Frame(np.eye(3)[:2]), 64, seed=0)


def test_in_slab_examples():
    s = Frame(np.eye(3)[:1])
    assert in_slab(s, [0, 1, 0], 1e-6)
    assert not in_slab(s, [1, 0, 0], 0.5)
    with pytest.raises(ZeroFrequency):
        in_slab(s, [0, 0, 0], 0.5)


vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(st.integers(0, 2**31), vec, st.floats(0.01, 2.0), st.floats(-100, 100).filter(lambda c: abs(c) > 1e-3))
def test_in_slab_scale_invariant(seed, xi, eta, c):
    s = random_subspace(3, 1, seed)
    # powers of two scale exactly in floating point
    scale = 2.0 ** round(math.log2(abs(c))) * math.copysign(1, c)
    assert in_slab(s, np.array(xi) * scale, eta) == in_slab(s, xi, eta)


@given(st.integers(0, 2**31), vec, st.floats(0.01, 1.0), st.floats(1.0, 3.0))
def test_in_slab_nested(seed, xi, eta, factor):
    s = random_subspace(3, 2, seed)
    if in_slab(s, xi, eta):
        assert in_slab(s, xi, eta * factor)


@given(vec, st.floats(1e-3, 3.0))
def test_slab_mass_range(xi, eta):
    m = nondegenerate_sphere_measure(3, np.eye(3)[2], 0.7, 64)
    val = slab_mass(m, xi, eta)
    assert 0 <= val <= 1
    if eta > 1:
        assert val == 1.0


def test_hyperplane_slab_mass(plane_lines):
    for eta in (1e-4, 0.01, 0.2):
        assert slab_mass(plane_lines, [0, 0, 5.0], eta) == 1.0


def test_circle_slab_mass_matches_arcsin(circle256):
    # lines within angle arcsin(eta) of the perpendicular of xi
    rng = np.random.default_rng(1)
    for eta in (0.05, 0.1, 0.2):
        for _ in range(5):
            xi = rng.standard_normal(2)
            exact = 2 / math.pi * math.asin(eta)
            assert abs(slab_mass(circle256, xi, eta) - exact) <= 3 * circle256.separation


def test_worst_case_finds_hyperplane_normal(plane_lines):
    for eta in ETAS:
        xi, mass = worst_case_slab_mass(plane_lines, eta, 1000, seed=0)
        assert mass == 1.0
        assert abs(abs(xi[2]) - 1) <= 1e-6 or slab_mass(plane_lines, xi, eta) == 1.0


def test_worst_case_large_eta(circle256):
    assert worst_case_slab_mass(circle256, 1 + 1e-9, 100)[1] == 1.0


def test_worst_case_monotone_in_eta():
    m = nondegenerate_sphere_measure(3, np.eye(3)[2], math.pi / 4, 1024)
    masses = [worst_case_slab_mass(m, e, 300, seed=3)[1] for e in sorted(ETAS)]
    assert all(a <= b for a, b in zip(masses, masses[1:]))


def test_fit_beta_sphere_d3():
    m = nondegenerate_sphere_measure(3, np.eye(3)[2], math.pi / 4, 4096)
    report = fit_beta(m, ETAS, 2000, seed=0, predicted_beta=0.5)
    assert 0.35 <= report.beta_hat <= 0.65
    assert list(report.sup_masses) == sorted(report.sup_masses, reverse=True)


def test_fit_beta_uniform_circle(circle256):
    report = fit_beta(circle256, ETAS, 500, seed=0)
    assert 0.8 <= report.beta_hat <= 1.2


def test_fit_beta_hyperplane():
    fine = hyperplane_family_measure(3, 1, Frame(np.eye(3)[:2]), 256, seed=0)
    report = fit_beta(fine, ETAS, 1000, seed=0)
    assert -0.1 <= report.beta_hat <= 0.1


def test_fit_beta_thread_independent():
    m = nondegenerate_sphere_measure(3, np.eye(3)[2], math.pi / 4, 512)
    a = fit_beta(m, ETAS, 200, seed=1, threads=1)
    b = fit_beta(m, ETAS, 200, seed=1, threads=3)
    assert a.sup_masses == b.sup_masses and a.xi_stars == b.xi_stars


def test_eta_grid_checks():
    with pytest.raises(InsufficientGrid):
        check_eta_grid(ETAS[:4], 0)
    with pytest.raises(InsufficientGrid):
        check_eta_grid([0.5] + ETAS[1:], 0)
    with pytest.raises(GridBelowResolution):
        check_eta_grid(ETAS, 1 / 64)
