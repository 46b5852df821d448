"""Discrete orientation measures on families of subspaces and their (d,k,Gamma)-set specs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import fibonacci_sphere, random_unit_vectors
from .bump import BumpProfile, default_bump
from .errors import BadDimensions, DegenerateSphere, LengthMismatch
from .grassmannian import (
    Frame,
    canonical_orientation,
    cross_min_cos,
    greedy_net_bases,
    random_bases,
    uniform_stream,
)

MASS_TOL = 1e-9
TRANSLATION_CAP = 10.0


@dataclass(frozen=True, eq=False)
class DiscreteOrientationMeasure:
    """Weighted atoms on G(d, k).

    ``bases`` is an ``(m, k, d)`` stack of orthonormal frames and ``masses``
    the matching positive weights summing to one.  ``separation`` is the net
    scale the atoms were built at (0 for exactly parametrized families).
    """

    bases: np.ndarray
    masses: np.ndarray
    separation: float = 0.0
    label: str = ""

    def __post_init__(self):
        bases = np.asarray(self.bases, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if bases.ndim != 3 or len(bases) != len(masses):
            raise LengthMismatch("need an (m, k, d) basis stack and m masses")
        if np.any(masses <= 0):
            raise ValueError("atom masses must be positive")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {masses.sum()!r}, not 1")
        bases.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "masses", masses)

    @property
    def ambient_dim(self) -> int:
        return self.bases.shape[2]

    @property
    def plane_dim(self) -> int:
        return self.bases.shape[1]

    def __len__(self):
        return len(self.masses)

    @property
    def atoms(self) -> list[tuple[Frame, float]]:
        return [(Frame(b, check=False), float(w)) for b, w in zip(self.bases, self.masses)]


@dataclass(frozen=True, eq=False)
class KakeyaMeasureSpec:
    """Orientation measure plus one translation per atom.

    Determines the measure obtained by spreading ``phi(r_1)...phi(r_k) dr`` over
    each translated unit cube ``t_s + sum r_i x_i`` and averaging against the
    orientation weights.
    """

    orientation: DiscreteOrientationMeasure
    translations: np.ndarray
    bump: BumpProfile = field(default_factory=default_bump, repr=False)

    def __post_init__(self):
        t = np.asarray(self.translations, dtype=float)
        m, d = len(self.orientation), self.orientation.ambient_dim
        if t.shape != (m, d):
            raise LengthMismatch(f"expected translations of shape {(m, d)}, got {t.shape}")
        if not np.all(np.isfinite(t)) or np.any(np.linalg.norm(t, axis=1) > TRANSLATION_CAP):
            raise ValueError(f"translations must be finite with norm <= {TRANSLATION_CAP}")
        t.setflags(write=False)
        object.__setattr__(self, "translations", t)


def _normalized(masses: np.ndarray) -> np.ndarray:
    return masses / masses.sum()


def voronoi_masses(centers: np.ndarray, samples: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Fraction of ``samples`` whose metric-nearest center is each center."""
    counts = np.zeros(len(centers))
    for s0 in range(0, len(samples), chunk):
        cos = cross_min_cos(samples[s0:s0 + chunk], centers)
        # nearest in metric == largest cos(theta_max)
        counts += np.bincount(cos.argmax(axis=1), minlength=len(centers))
    return counts / len(samples)


def uniform_grassmannian_measure(d: int, k: int, n: int, budget: int = 100_000,
                                 seed: int = 0) -> DiscreteOrientationMeasure:
    """Invariant measure on G(d, k) discretized on a greedy (1/n)-net.

    Each center gets the Monte-Carlo mass of its Voronoi cell, estimated from
    ``budget`` further invariant samples.  Atom bases are put in canonical
    orientation (see :func:`canonical_orientation`).
    """
    if d < 2 or not 1 <= k < d:
        raise BadDimensions(f"need d >= 2 and 1 <= k < d, got d={d}, k={k}")
    if n < 2:
        raise BadDimensions("net parameter n must be >= 2")
    centers = greedy_net_bases(uniform_stream(d, k, seed), 1.0 / n, budget)
    samples = random_bases(d, k, budget, seed, stream=2)
    masses = voronoi_masses(centers, samples)
    # cells that caught no sample carry no estimated mass
    keep = masses > 0
    return DiscreteOrientationMeasure(
        canonical_orientation(centers[keep]), _normalized(masses[keep]), separation=1.0 / n,
        label=f"uniform G({d},{k}), n={n}",
    )


def orthogonal_complement(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the complement of the rows of ``vectors``."""
    v = np.atleast_2d(vectors)
    _, _, vt = np.linalg.svd(v, full_matrices=True)
    return vt[v.shape[0]:]


def _random_rotation(dim: int, seed: int) -> np.ndarray:
    g = np.random.default_rng(seed).standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def nondegenerate_sphere_measure(d: int, axis, polar_angle: float, m: int,
                                 seed: int = 0) -> DiscreteOrientationMeasure:
    """Equal-mass lines through ``cos(a) e + sin(a) v`` for quasi-uniform ``v``.

    ``v`` runs over the unit (d-2)-sphere orthogonal to ``axis``; the direction
    set has diameter ``2 sin(a) < 2``.
    """
    if d < 3:
        raise BadDimensions("non-degenerate spheres need d >= 3")
    if polar_angle >= math.pi / 2 - 1e-6:
        raise DegenerateSphere("polar angle pi/2 gives a hyperplane section")
    if polar_angle <= 0:
        raise DegenerateSphere("polar angle must be positive")
    if m < 8:
        raise ValueError("need m >= 8 atoms")
    e = np.asarray(axis, dtype=float)
    if e.shape != (d,):
        raise BadDimensions(f"axis must have length {d}")
    e = e / np.linalg.norm(e)
    perp = orthogonal_complement(e[None])
    if d == 3:
        offset = np.random.default_rng(seed).uniform(0, 2 * math.pi / m)
        ang = offset + 2 * math.pi * np.arange(m) / m
        coords = np.column_stack([np.cos(ang), np.sin(ang)])
    elif d == 4:
        coords = fibonacci_sphere(m) @ _random_rotation(3, seed).T
    else:
        coords = random_unit_vectors(d - 1, m, seed)
    dirs = math.cos(polar_angle) * e + math.sin(polar_angle) * (coords @ perp)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return DiscreteOrientationMeasure(
        dirs[:, None, :], np.full(m, 1.0 / m),
        label=f"sphere of directions d={d}, a={polar_angle:.4g}",
    )


def hyperplane_family_measure(d: int, k: int, hyperplane: Frame, n: int,
                              budget: int = 100_000, seed: int = 0) -> DiscreteOrientationMeasure:
    """Invariant measure on the k-planes contained in the hyperplane V."""
    if not 1 <= k < d - 1:
        raise BadDimensions(f"need 1 <= k < d - 1, got d={d}, k={k}")
    if hyperplane.ambient_dim != d or hyperplane.plane_dim != d - 1:
        raise BadDimensions("hyperplane must be a (d-1)-frame in R^d")
    inner = uniform_grassmannian_measure(d - 1, k, n, budget, seed)
    bases = inner.bases @ hyperplane.basis
    return DiscreteOrientationMeasure(
        bases, inner.masses, separation=inner.separation,
        label=f"k-planes in a hyperplane of R^{d}, k={k}, n={n}",
    )


def assign_translations(measure: DiscreteOrientationMeasure, strategy: str = "zero",
                        seed: int = 0, side: float = 1.0, fixed=None,
                        bump: BumpProfile | None = None) -> KakeyaMeasureSpec:
    """Attach translations ``t_s`` to every atom.

    strategy
        ``"zero"``: all translations vanish.
        ``"random_box"``: i.i.d. uniform coordinates in ``[0, side]``.
        ``"fixed"``: use the ``fixed`` list verbatim.
    """
    m, d = len(measure), measure.ambient_dim
    if strategy == "zero":
        t = np.zeros((m, d))
    elif strategy == "random_box":
        t = np.random.default_rng(seed).uniform(0.0, side, size=(m, d))
    elif strategy == "fixed":
        t = np.asarray(fixed, dtype=float)
        if t.shape != (m, d):
            raise LengthMismatch(f"fixed translations need shape {(m, d)}, got {t.shape}")
    else:
        raise ValueError(f"unknown translation strategy {strategy!r}")
    return KakeyaMeasureSpec(measure, t, bump if bump is not None else default_bump())
