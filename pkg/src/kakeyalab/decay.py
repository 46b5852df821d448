"""Fourier-decay exponents from shell maxima on dyadic radii."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._util import is_power_of_two, loglog_fit, pmap, sobol_directions
from .errors import InsufficientGrid

REFINEMENTS = 20
TINY = 1e-300

FrequencyFunction = Callable[[np.ndarray], np.ndarray]


def _abs_on(F, xi: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(F(xi))).reshape(len(xi))


def shell_max(F: FrequencyFunction, R: float, m: int, seed: int, dim: int,
              refinements: int = REFINEMENTS) -> tuple[float, np.ndarray]:
    """Largest ``|F|`` found on the sphere of radius ``R``.

    ``F`` takes an ``(n, dim)`` array of frequencies.  ``m`` scrambled-Sobol
    directions are scanned, then the best one is refined by ``refinements``
    coordinate-perturbation steps with step halving.  Returns the maximum and
    the frequency attaining it.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if m < 16:
        raise ValueError("need m >= 16 directions")
    dirs = sobol_directions(dim, m, seed)
    vals = _abs_on(F, R * dirs)
    best = int(np.argmax(vals))
    u, top = dirs[best], float(vals[best])
    step = 2.0 * m ** (-1.0 / (dim - 1))
    eye = np.eye(dim)
    for _ in range(refinements):
        trial = np.concatenate([u + step * eye, u - step * eye])
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        tv = _abs_on(F, R * trial)
        j = int(np.argmax(tv))
        if tv[j] > top:
            u, top = trial[j], float(tv[j])
        else:
            step /= 2.0
    return top, R * u


@dataclass(frozen=True)
class DecayFit:
    radii: tuple[float, ...]
    shell_maxima: tuple[float, ...]
    slope: float
    fourier_dim_estimate: float
    r_squared: float
    samples_per_shell: int
    ambient_dim: int
    argmax_frequencies: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    @property
    def reliable(self) -> bool:
        return self.r_squared >= 0.9

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "shell_maxima": list(self.shell_maxima),
            "slope": self.slope,
            "fourier_dim_estimate": self.fourier_dim_estimate,
            "r_squared": self.r_squared,
            "reliable": self.reliable,
            "samples_per_shell": self.samples_per_shell,
            "ambient_dim": self.ambient_dim,
        }


def check_radius_grid(R_grid) -> list[float]:
    radii = sorted(float(r) for r in R_grid)
    if len(radii) < 5:
        raise InsufficientGrid(f"need >= 5 shells, got {len(radii)}")
    if len(set(radii)) != len(radii):
        raise InsufficientGrid("radii must be distinct")
    if radii[0] < 4 or any(not is_power_of_two(r) for r in radii):
        raise InsufficientGrid("radii must be powers of two, at least 4")
    return radii


def decay_fit_from_maxima(radii, shell_maxima, ambient_dim: int,
                          samples_per_shell: int = 0, argmax=()) -> DecayFit:
    """Slope of ``-log max|F|`` against ``log R`` and the implied dimension."""
    maxima = np.maximum(np.asarray(shell_maxima, dtype=float), TINY)
    fit = loglog_fit(radii, maxima)
    slope = -fit.slope
    dim_est = float(np.clip(2.0 * slope, 0.0, ambient_dim))
    return DecayFit(tuple(float(r) for r in radii), tuple(float(v) for v in shell_maxima),
                    slope, dim_est, fit.r_squared, samples_per_shell, ambient_dim,
                    tuple(tuple(float(c) for c in a) for a in argmax))


def fit_decay(F: FrequencyFunction, R_grid, m: int, seed: int, dim: int,
              refinements: int = REFINEMENTS, threads: int = 1) -> DecayFit:
    radii = check_radius_grid(R_grid)
    shells = pmap(lambda R: shell_max(F, R, m, seed, dim, refinements), radii, threads)
    return decay_fit_from_maxima(radii, [s[0] for s in shells], dim, m, [s[1] for s in shells])
