"""Seeding, sphere point sets, log-log fits and a tiny parallel map."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.stats import qmc

BLOCK = 4096


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    """Counter-based generator: block ``block`` of stream ``stream``.

    Draws never depend on how many blocks other workers consume.
    """
    return np.random.default_rng([int(seed), int(stream), int(block)])


def gaussian_blocks(seed: int, stream: int, n: int, shape: tuple[int, ...]) -> np.ndarray:
    """First ``n`` rows of a block-seeded standard normal sequence (prefix stable in ``n``)."""
    out = np.empty((n,) + tuple(shape))
    for b0 in range(0, n, BLOCK):
        b1 = min(n, b0 + BLOCK)
        out[b0:b1] = block_rng(seed, stream, b0 // BLOCK).standard_normal((BLOCK,) + tuple(shape))[: b1 - b0]
    return out


def random_unit_vectors(d: int, n: int, seed: int, stream: int = 0) -> np.ndarray:
    g = gaussian_blocks(seed, stream, n, (d,))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sobol_directions(d: int, n: int, seed: int) -> np.ndarray:
    """Scrambled-Sobol points mapped to the unit sphere in R^d.

    The first ``n`` points do not depend on how many are requested, so sample
    sets for increasing ``n`` are nested.
    """
    if d == 2:
        sob = qmc.Sobol(1, scramble=True, seed=seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            u = sob.random(n)[:, 0]
        ang = 2 * np.pi * u
        return np.column_stack([np.cos(ang), np.sin(ang)])
    sob = qmc.Sobol(d, scramble=True, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = sob.random(n)
    g = stats.norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def fibonacci_sphere(n: int, offset: float = 0.5) -> np.ndarray:
    """Quasi-uniform points on S^2 (golden-angle spiral)."""
    i = np.arange(n) + offset
    z = 1 - 2 * i / n
    r = np.sqrt(np.clip(1 - z * z, 0, None))
    phi = np.pi * (3 - math.sqrt(5)) * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def quasi_uniform_sphere(dim: int, n: int, seed: int = 0) -> np.ndarray:
    """``n`` quasi-uniform points on the unit sphere S^{dim-1} in R^dim.

    dim=1 gives the two points +-1, dim=2 an equally spaced circle, dim=3 a
    Fibonacci spiral; higher dimensions fall back to seeded Gaussian directions.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        return fibonacci_sphere(n)
    return random_unit_vectors(dim, n, seed, stream=991)


def is_power_of_two(x: float, tol: float = 1e-9, steps_per_octave: int = 1) -> bool:
    e = math.log2(x) * steps_per_octave
    return abs(e - round(e)) <= tol


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float


def loglog_fit(x, y) -> LogLogFit:
    """Least-squares line through (log x, log y)."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if np.ptp(ly) == 0.0:
        return LogLogFit(0.0, float(ly[0]), 1.0)
    res = stats.linregress(lx, ly)
    return LogLogFit(float(res.slope), float(res.intercept), float(res.rvalue**2))


def pmap(fn, items, threads: int = 1) -> list:
    """Ordered map; with threads > 1 items run on a thread pool."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
