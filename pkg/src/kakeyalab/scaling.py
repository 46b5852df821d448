"""Slabs of subspaces nearly orthogonal to a frequency, and beta-scaling fits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import is_power_of_two, loglog_fit, pmap, random_unit_vectors
from .errors import GridBelowResolution, InsufficientGrid, ZeroFrequency
from .grassmannian import Frame
from .orientation import DiscreteOrientationMeasure

HILL_STEPS = 50
HILL_STEP0 = 0.25


def _frequency(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    norms = np.linalg.norm(xi, axis=-1)
    if np.any(norms == 0):
        raise ZeroFrequency("xi must be nonzero")
    return xi


def in_slab(s: Frame, xi, eta: float) -> bool:
    """True iff ``|xi . x_i| < eta |xi|`` for every basis vector of ``s``."""
    xi = _frequency(xi)
    if eta <= 0:
        raise ValueError("eta must be positive")
    return bool(np.all(np.abs(s.basis @ xi) < eta * np.linalg.norm(xi)))


def slab_mass(measure: DiscreteOrientationMeasure, xi, eta: float, chunk: int = 256):
    """Orientation mass of the slab; ``xi`` may be one vector or an ``(n, d)`` batch."""
    xi = _frequency(xi)
    if eta <= 0:
        raise ValueError("eta must be positive")
    single = xi.ndim == 1
    unit = np.atleast_2d(xi)
    unit = unit / np.linalg.norm(unit, axis=1, keepdims=True)
    m, k, d = measure.bases.shape
    flat = measure.bases.reshape(m * k, d).T
    out = np.empty(len(unit))
    for c0 in range(0, len(unit), chunk):
        dots = np.abs(unit[c0:c0 + chunk] @ flat).reshape(-1, m, k)
        inside = dots.max(axis=2) < eta
        out[c0:c0 + chunk] = inside @ measure.masses
    out = np.minimum(out, 1.0)
    return float(out[0]) if single else out


def _hill_climb(measure, eta, xi, mass, steps=HILL_STEPS, step0=HILL_STEP0):
    d = len(xi)
    eye = np.eye(d)
    step = step0
    for _ in range(steps):
        trial = np.concatenate([xi + step * eye, xi - step * eye])
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        masses = slab_mass(measure, trial, eta)
        best = int(np.argmax(masses))
        if masses[best] > mass:
            xi, mass = trial[best], float(masses[best])
        else:
            step /= 2.0
    return xi, mass


def worst_case_slab_mass(measure: DiscreteOrientationMeasure, eta: float,
                         search_budget: int = 2000, seed: int = 0,
                         extra_candidates=None) -> tuple[np.ndarray, float]:
    """Largest slab mass found over unit frequencies (a lower bound on the sup).

    Scans ``search_budget`` seeded random directions (plus any
    ``extra_candidates``), then hill-climbs from the best one by coordinate
    perturbations with step halving.
    """
    if search_budget < 10:
        raise ValueError("search_budget must be >= 10")
    cand = random_unit_vectors(measure.ambient_dim, search_budget, seed, stream=7)
    if extra_candidates is not None and len(extra_candidates):
        extra = np.atleast_2d(np.asarray(extra_candidates, dtype=float))
        cand = np.concatenate([cand, extra / np.linalg.norm(extra, axis=1, keepdims=True)])
    masses = slab_mass(measure, cand, eta)
    best = int(np.argmax(masses))
    xi, mass = cand[best], float(masses[best])
    if mass >= 1.0:
        return xi, mass
    return _hill_climb(measure, eta, xi, mass)


@dataclass(frozen=True)
class ScalingReport:
    eta_grid: tuple[float, ...]
    sup_masses: tuple[float, ...]
    beta_hat: float
    r_squared: float
    predicted_beta: float | None = None
    xi_stars: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    @property
    def reliable(self) -> bool:
        return self.r_squared >= 0.9

    def to_dict(self) -> dict:
        return {
            "eta_grid": list(self.eta_grid),
            "sup_masses": list(self.sup_masses),
            "beta_hat": self.beta_hat,
            "r_squared": self.r_squared,
            "predicted_beta": self.predicted_beta,
            "xi_stars": [list(x) for x in self.xi_stars],
        }


def check_eta_grid(eta_grid, separation: float) -> list[float]:
    grid = sorted((float(e) for e in eta_grid), reverse=True)
    if len(grid) < 5:
        raise InsufficientGrid(f"need >= 5 eta values, got {len(grid)}")
    if len(set(grid)) != len(grid):
        raise InsufficientGrid("eta values must be distinct")
    if grid[0] > 0.25 or any(not is_power_of_two(e) for e in grid):
        raise InsufficientGrid("eta values must be powers of two <= 1/4")
    if grid[-1] < 2.0 * separation:
        raise GridBelowResolution(
            f"smallest eta {grid[-1]:.4g} is below twice the net separation {separation:.4g}"
        )
    return grid


def fit_beta(measure: DiscreteOrientationMeasure, eta_grid, search_budget: int = 2000,
             seed: int = 0, predicted_beta: float | None = None,
             threads: int = 1) -> ScalingReport:
    """Fit the exponent of ``sup_xi gamma(S_{xi, eta}) ~ eta^beta``.

    Worst-case frequencies found at every eta are pooled and re-scored at every
    other eta, which makes the reported sup masses monotone in eta.
    """
    grid = check_eta_grid(eta_grid, measure.separation)
    found = pmap(lambda e: worst_case_slab_mass(measure, e, search_budget, seed), grid, threads)
    pool = np.array([xi for xi, _ in found])
    sups, stars = [], []
    for e, (xi, mass) in zip(grid, found):
        pooled = slab_mass(measure, pool, e)
        j = int(np.argmax(pooled))
        if pooled[j] > mass:
            xi, mass = pool[j], float(pooled[j])
        sups.append(mass)
        stars.append(tuple(float(v) for v in xi))
    fit = loglog_fit(grid, sups)
    return ScalingReport(tuple(grid), tuple(sups), fit.slope, fit.r_squared,
                         predicted_beta, tuple(stars))
