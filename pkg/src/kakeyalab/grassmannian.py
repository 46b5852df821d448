"""Points of the Grassmannian G(d, k) as orthonormal frames.

A subspace is stored through an orthonormal basis ``x_1, ..., x_k`` held as
the rows of a ``(k, d)`` array.  Distances use the Hausdorff distance between
the unit spheres of the two subspaces, which for equal-dimension subspaces is
``2 sin(theta_max / 2)`` with ``theta_max`` the largest principal angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from scipy.spatial import cKDTree

from ._util import BLOCK, block_rng, loglog_fit, quasi_uniform_sphere
from .errors import BadDimensions, DimensionMismatch, InsufficientGrid, RankDeficient

ORTHO_TOL = 1e-9
RANK_TOL = 1e-8
MAX_DISTANCE = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal k-frame in R^d standing for its span in G(d, k)."""

    basis: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[None, :]
        if b.ndim != 2:
            raise BadDimensions(f"basis must be a (k, d) array, got shape {b.shape}")
        k, d = b.shape
        if d < 2 or not 1 <= k < d:
            raise BadDimensions(f"need d >= 2 and 1 <= k < d, got d={d}, k={k}")
        if self.check:
            gram = b @ b.T
            if np.max(np.abs(gram - np.eye(k))) > ORTHO_TOL:
                raise RankDeficient("basis is not orthonormal; use orthonormalize()")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def plane_dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def __repr__(self):
        return f"Frame(d={self.ambient_dim}, k={self.plane_dim})"


def _qr_rows(raw: np.ndarray) -> np.ndarray:
    """Orthonormalize the rows of (..., k, d) arrays with a sign-fixed QR."""
    q, r = np.linalg.qr(np.swapaxes(raw, -1, -2))
    s = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    s = np.where(s == 0, 1.0, s)
    return np.swapaxes(q * s[..., None, :], -1, -2)


def canonical_orientation(bases: np.ndarray) -> np.ndarray:
    """Flip each basis vector so its last nonzero coordinate is positive.

    The span is unchanged; the sign only matters for the unit cube ``t + sum
    r_i x_i`` a frame carries, which then opens into the upper half-space.
    """
    b = np.array(bases, dtype=float)
    flat = b.reshape(-1, b.shape[-1])
    nz = np.abs(flat) > 1e-12
    last = flat.shape[1] - 1 - np.argmax(nz[:, ::-1], axis=1)
    sign = np.where(flat[np.arange(len(flat)), last] < 0, -1.0, 1.0)
    return (flat * sign[:, None]).reshape(b.shape)


def orthonormalize(raw) -> Frame:
    """Orthonormal frame spanning the rows of ``raw`` (shape ``(k, d)``)."""
    a = np.atleast_2d(np.asarray(raw, dtype=float))
    k, d = a.shape
    if d < 2 or not 1 <= k < d:
        raise BadDimensions(f"need d >= 2 and 1 <= k < d, got d={d}, k={k}")
    smin = np.linalg.svd(a, compute_uv=False)[-1]
    if smin <= RANK_TOL:
        raise RankDeficient(f"smallest singular value {smin:.3g} <= {RANK_TOL}")
    return Frame(_qr_rows(a))


def _check_pair(s: Frame, t: Frame):
    if s.basis.shape != t.basis.shape:
        raise DimensionMismatch(
            f"G({s.ambient_dim},{s.plane_dim}) vs G({t.ambient_dim},{t.plane_dim})"
        )


def principal_angles(s: Frame, t: Frame) -> np.ndarray:
    """Principal angles between the spans, ascending, in [0, pi/2]."""
    _check_pair(s, t)
    cos = np.linalg.svd(s.basis @ t.basis.T, compute_uv=False)
    return np.sort(np.arccos(np.clip(cos, 0.0, 1.0)))


def metric(s: Frame, t: Frame) -> float:
    """Hausdorff distance between the unit spheres of ``span(s)`` and ``span(t)``.

    For a unit vector ``a`` in one span the nearest unit vector of the other is
    its normalized projection, at distance ``2 sin(angle/2)``; the sup over
    ``a`` picks the largest principal angle.
    """
    _check_pair(s, t)
    # fixed argument order makes the result exactly symmetric
    if s.basis.tobytes() > t.basis.tobytes():
        s, t = t, s
    cross = s.basis @ t.basis.T
    cos_max = np.linalg.svd(cross, compute_uv=False)[-1]
    resid = s.basis - cross @ t.basis
    sin_max = np.linalg.svd(resid, compute_uv=False)[0]
    theta = math.atan2(sin_max, cos_max)
    return min(2.0 * math.sin(theta / 2.0), MAX_DISTANCE)


def metric_oracle(s: Frame, t: Frame, n_samples: int = 4096) -> float:
    """Brute-force Hausdorff distance from point clouds on both unit spheres.

    Each subspace sphere S^{k-1} is sampled with ``n_samples`` quasi-uniform
    points (exactly the two points +-x for k = 1) and the sup-inf is taken over
    the clouds.  The error is bounded by the sampling mesh.
    """
    _check_pair(s, t)
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    coeffs = quasi_uniform_sphere(s.plane_dim, n_samples)
    a = coeffs @ s.basis
    b = coeffs @ t.basis
    dots = a @ b.T
    # |a - b|^2 = 2 - 2 a.b on unit vectors
    nearest_from_a = dots.max(axis=1)
    nearest_from_b = dots.max(axis=0)
    worst = min(nearest_from_a.min(), nearest_from_b.min())
    return float(math.sqrt(max(2.0 - 2.0 * worst, 0.0)))


def _validate_dims(d: int, k: int):
    if d < 2 or not 1 <= k < d:
        raise BadDimensions(f"need d >= 2 and 1 <= k < d, got d={d}, k={k}")


def random_subspace(d: int, k: int, seed: int) -> Frame:
    """Draw from the orthogonally invariant law on G(d, k)."""
    _validate_dims(d, k)
    g = np.random.default_rng(seed).standard_normal((k, d))
    return Frame(_qr_rows(g), check=False)


def random_bases(d: int, k: int, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """``n`` invariant random frames as a ``(n, k, d)`` stack, block seeded."""
    _validate_dims(d, k)
    out = np.empty((n, k, d))
    for b0 in range(0, n, BLOCK):
        b1 = min(n, b0 + BLOCK)
        g = block_rng(seed, stream, b0 // BLOCK).standard_normal((BLOCK, k, d))[: b1 - b0]
        out[b0:b1] = _qr_rows(g)
    return out


def uniform_stream(d: int, k: int, seed: int, stream: int = 1) -> Iterator[np.ndarray]:
    """Endless stream of ``(BLOCK, k, d)`` batches of invariant random frames."""
    _validate_dims(d, k)
    block = 0
    while True:
        g = block_rng(seed, stream, block).standard_normal((BLOCK, k, d))
        yield _qr_rows(g)
        block += 1


def cross_min_cos(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """cos(theta_max) for every pair of an ``(n,k,d)`` and an ``(m,k,d)`` stack."""
    n, k, d = a.shape
    m = b.shape[0]
    if k == 1:
        return np.abs(a[:, 0, :] @ b[:, 0, :].T)
    g = (a.reshape(n * k, d) @ b.reshape(m * k, d).T).reshape(n, k, m, k)
    g = g.transpose(0, 2, 1, 3)
    return _smallest_singular(g)


def paired_min_cos(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """cos(theta_max) for row-aligned ``(n,k,d)`` stacks."""
    if a.shape[1] == 1:
        return np.abs(np.einsum("nd,nd->n", a[:, 0, :], b[:, 0, :]))
    return _smallest_singular(np.einsum("nid,njd->nij", a, b))


def _smallest_singular(g: np.ndarray) -> np.ndarray:
    k = g.shape[-1]
    if k == 2:
        p, q, r, s = g[..., 0, 0], g[..., 0, 1], g[..., 1, 0], g[..., 1, 1]
        fro = p * p + q * q + r * r + s * s
        det = p * s - q * r
        disc = np.sqrt(np.maximum(fro * fro - 4.0 * det * det, 0.0))
        lo = np.maximum(fro - disc, 0.0) / 2.0
        # small root via the product of roots avoids cancellation
        hi = (fro + disc) / 2.0
        lo = np.where(hi > 0, det * det / np.where(hi > 0, hi, 1.0), lo)
        return np.sqrt(np.clip(lo, 0.0, 1.0))
    ev = np.linalg.eigvalsh(np.swapaxes(g, -1, -2) @ g)[..., 0]
    return np.sqrt(np.clip(ev, 0.0, 1.0))


def distance_from_cos(cos_max) -> np.ndarray:
    return np.sqrt(np.clip(2.0 - 2.0 * np.asarray(cos_max), 0.0, 2.0))


def _projector_embedding(bases: np.ndarray) -> np.ndarray:
    """Isometric embedding of projectors (Frobenius) into R^{d(d+1)/2}."""
    p = np.einsum("nki,nkj->nij", bases, bases)
    d = bases.shape[2]
    iu, ju = np.triu_indices(d)
    w = np.where(iu == ju, 1.0, math.sqrt(2.0))
    return p[:, iu, ju] * w


class _CenterIndex:
    """Accepted net centers with a KD-tree over projector embeddings.

    ``||P_s - P_t||_F <= sqrt(2k) sin(theta_max)``, so a Frobenius ball of the
    matching radius contains every center within metric distance delta.
    """

    rebuild_every = 1024

    def __init__(self, k: int, d: int, separation: float):
        self.k, self.d = k, d
        self.cos_threshold = 1.0 - separation * separation / 2.0
        theta = 2.0 * math.asin(min(separation / 2.0, 1.0))
        self.radius = math.sqrt(2 * k) * math.sin(min(theta, math.pi / 2)) + 1e-12
        self.bases = np.empty((0, k, d))
        self.emb = np.empty((0, d * (d + 1) // 2))
        self.tree = None
        self.n_tree = 0

    def __len__(self):
        return len(self.bases)

    def add(self, bases: np.ndarray, emb: np.ndarray):
        self.bases = np.concatenate([self.bases, bases])
        self.emb = np.concatenate([self.emb, emb])
        if len(self.bases) - self.n_tree >= self.rebuild_every:
            self.tree = cKDTree(self.emb)
            self.n_tree = len(self.bases)

    def covered(self, cand: np.ndarray, emb: np.ndarray) -> np.ndarray:
        out = np.zeros(len(cand), dtype=bool)
        if self.n_tree:
            lists = self.tree.query_ball_point(emb, self.radius)
            counts = np.fromiter((len(x) for x in lists), int, len(lists))
            if counts.sum():
                ii = np.repeat(np.arange(len(cand)), counts)
                jj = np.concatenate([np.asarray(x, dtype=int) for x in lists if x])
                hit = paired_min_cos(cand[ii], self.bases[jj]) > self.cos_threshold
                out[ii[hit]] = True
        recent = self.bases[self.n_tree:]
        if len(recent):
            todo = ~out
            if todo.any():
                c = cross_min_cos(cand[todo], recent)
                out[np.flatnonzero(todo)[(c > self.cos_threshold).any(axis=1)]] = True
        return out


def _as_batches(stream: Iterable) -> Iterator[np.ndarray]:
    for item in stream:
        if isinstance(item, Frame):
            yield item.basis[None]
        else:
            a = np.asarray(item, dtype=float)
            yield a[None] if a.ndim == 2 else a


def greedy_net_bases(stream: Iterable, separation: float, budget: int,
                     sub_block: int = 256) -> np.ndarray:
    """Greedy delta-separated subset of the first ``budget`` stream elements.

    Candidates are examined in stream order; a candidate joins the net when it
    is at distance >= ``separation`` from every center accepted before it.
    Returns a ``(N, k, d)`` stack.
    """
    if separation <= 0:
        raise ValueError("separation must be positive")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    index = None
    seen = 0
    for batch in _as_batches(stream):
        if seen >= budget:
            break
        batch = batch[: budget - seen]
        seen += len(batch)
        if index is None:
            index = _CenterIndex(batch.shape[1], batch.shape[2], separation)
        for s0 in range(0, len(batch), sub_block):
            cand = batch[s0:s0 + sub_block]
            emb = _projector_embedding(cand)
            if len(index):
                keep = ~index.covered(cand, emb)
                cand, emb = cand[keep], emb[keep]
            if not len(cand):
                continue
            close = cross_min_cos(cand, cand) > index.cos_threshold
            alive = np.ones(len(cand), dtype=bool)
            accepted = []
            for i in range(len(cand)):
                if alive[i]:
                    accepted.append(i)
                    alive &= ~close[i]
            index.add(cand[accepted], emb[accepted])
    if index is None:
        return np.empty((0, 0, 0))
    return index.bases


def greedy_net(stream: Iterable, separation: float, budget: int) -> list[Frame]:
    """Maximal (relative to the examined stream) ``separation``-separated net.

    ``stream`` yields :class:`Frame` objects or ``(b, k, d)`` basis batches.
    """
    bases = greedy_net_bases(stream, separation, budget)
    return [Frame(b, check=False) for b in bases]


@dataclass(frozen=True)
class CoveringFit:
    dims: tuple[int, int]
    eta_grid: tuple[float, ...]
    net_sizes: tuple[int, ...]
    exponent: float
    r_squared: float

    @property
    def manifold_dim(self) -> int:
        d, k = self.dims
        return k * (d - k)


def _is_sub_dyadic(x: float) -> bool:
    # powers of two, including half and quarter octaves
    e = 4.0 * math.log2(x)
    return abs(e - round(e)) <= 1e-9


def covering_exponent(d: int, k: int, eta_grid, budget: int = 100_000,
                      seed: int = 0) -> CoveringFit:
    """Slope of log N_eta against -log eta for greedy nets of G(d, k).

    ``N_eta`` is the size of the greedy eta-net of ``budget`` invariant
    samples, which estimates the covering number, so the slope estimates
    ``dim G(d, k) = k (d - k)``.
    """
    _validate_dims(d, k)
    grid = [float(e) for e in eta_grid]
    if len(grid) < 4:
        raise InsufficientGrid(f"need >= 4 grid values, got {len(grid)}")
    if any(not 0 < e <= 0.5 for e in grid) or any(not _is_sub_dyadic(e) for e in grid):
        raise InsufficientGrid("grid values must be powers of 2^(1/4) in (0, 1/2]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise InsufficientGrid("grid must be strictly decreasing")
    sizes = [len(greedy_net_bases(uniform_stream(d, k, seed), e, budget)) for e in grid]
    fit = loglog_fit(1.0 / np.array(grid), sizes)
    return CoveringFit((d, k), tuple(grid), tuple(sizes), fit.slope, fit.r_squared)
