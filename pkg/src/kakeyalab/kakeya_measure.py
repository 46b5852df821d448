"""Fourier transforms of the measures carried by (d,k,Gamma)-sets.

For a discrete orientation measure the transform factorizes exactly:

    mu_hat(xi) = sum_j w_j exp(-2 pi i t_j . xi) prod_i phi_hat(xi . x_i^j)

so no quadrature over the cube parameters is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import quasi_uniform_sphere
from .bump import BumpProfile, default_bump, oscillatory_nodes
from .errors import BadDimensions, BadParameters
from .orientation import KakeyaMeasureSpec, assign_translations, nondegenerate_sphere_measure

CHUNK = 1 << 22


def _frequencies(xi, d: int) -> tuple[np.ndarray, bool]:
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    xi = np.atleast_2d(xi)
    if xi.shape[1] != d:
        raise BadDimensions(f"frequencies must live in R^{d}")
    return xi, single


def _atom_products(spec: KakeyaMeasureSpec, xi: np.ndarray, modulus: bool) -> np.ndarray:
    bases = spec.orientation.bases
    m, k, d = bases.shape
    u = (xi @ bases.reshape(m * k, d).T).reshape(len(xi), m, k)
    if modulus:
        return np.prod(spec.bump.abs_phi_hat(u), axis=2)
    return np.prod(spec.bump.phi_hat(u), axis=2)


def _batched(fn, xi: np.ndarray, m: int, k: int, dtype) -> np.ndarray:
    rows = max(1, CHUNK // max(1, m * k))
    out = np.empty(len(xi), dtype=dtype)
    for r0 in range(0, len(xi), rows):
        out[r0:r0 + rows] = fn(xi[r0:r0 + rows])
    return out


def mu_hat(spec: KakeyaMeasureSpec, xi):
    """Fourier transform of the induced measure at one frequency or an ``(n, d)`` batch."""
    orient = spec.orientation
    xi, single = _frequencies(xi, orient.ambient_dim)

    def block(x):
        phase = np.exp(-2j * np.pi * (x @ spec.translations.T))
        return (phase * _atom_products(spec, x, modulus=False)) @ orient.masses

    out = _batched(block, xi, len(orient), orient.plane_dim, complex)
    return complex(out[0]) if single else out


def mu_hat_envelope(spec: KakeyaMeasureSpec, xi):
    """``sum_j w_j prod_i |phi_hat(xi . x_i^j)|``; blind to translations."""
    orient = spec.orientation
    xi, single = _frequencies(xi, orient.ambient_dim)

    def block(x):
        return _atom_products(spec, x, modulus=True) @ orient.masses

    out = _batched(block, xi, len(orient), orient.plane_dim, float)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class FrequencySample:
    xi: tuple[float, ...]
    value: complex
    envelope: float


def sample(spec: KakeyaMeasureSpec, xi) -> FrequencySample:
    xi = np.asarray(xi, dtype=float)
    return FrequencySample(tuple(xi.tolist()), mu_hat(spec, xi), mu_hat_envelope(spec, xi))


def split_bound_terms(beta: float, alpha: float, xi_norm: float) -> tuple[float, float]:
    """The two pieces ``eta^beta`` and ``(eta |xi|)^-N`` of the decay bound.

    With ``eta = |xi|^-alpha`` and ``N = alpha beta / (1 - alpha)`` both equal
    ``|xi|^(-alpha beta)``.
    """
    if not 0 < alpha < 1:
        raise BadParameters("alpha must lie in (0, 1)")
    if beta <= 0:
        raise BadParameters("beta must be positive")
    if xi_norm <= 1:
        raise BadParameters("|xi| must exceed 1")
    eta = xi_norm ** (-alpha)
    n = alpha * beta / (1.0 - alpha)
    return eta**beta, (eta * xi_norm) ** (-n)


def split_bound(beta: float, alpha: float, xi_norm: float) -> float:
    """Decay bound ``eta^beta + (eta |xi|)^-N``, constants dropped."""
    a, b = split_bound_terms(beta, alpha, xi_norm)
    return a + b


def theta_nodes_for(xi_norm: float, n_theta: int = 64) -> int:
    """Direction count growing linearly with |xi|, never below ``n_theta``."""
    return max(n_theta, 64 + math.ceil(2.5 * math.pi * xi_norm))


def sphere_dual_mu_hat(d: int, centers, xi, n_r: int = 64, n_theta: int = 64,
                       bump: BumpProfile | None = None):
    """Transform of ``int_0^1 int_S f(x_r + r theta) phi(r) dsigma(theta) dr``.

    ``centers`` maps an array of radii to an ``(n, d)`` array of sphere
    centres; ``None`` puts every centre at the origin, in which case the radial
    integral is exactly ``phi_hat(theta . xi)``.  Otherwise radii use composite
    Gauss-Legendre panels sized for the oscillation.  Directions use a
    quasi-uniform point set (equally spaced on the circle).  Node counts grow
    linearly with |xi| from the floors ``n_r`` and ``n_theta``.
    """
    if n_r < 64 or n_theta < 64:
        raise ValueError("need n_r >= 64 and n_theta >= 64")
    bump = bump or default_bump()
    xi, single = _frequencies(xi, d)
    out = np.empty(len(xi), dtype=complex)
    for i, x in enumerate(xi):
        norm = float(np.linalg.norm(x))
        theta = quasi_uniform_sphere(d, theta_nodes_for(norm, n_theta))
        if centers is None:
            out[i] = bump.phi_hat(theta @ x).mean()
            continue
        r_probe = np.linspace(0.0, 1.0, 65)
        drift = np.abs(np.diff(np.asarray(centers(r_probe), dtype=float) @ x)).max() * 64
        r, w = oscillatory_nodes(2 * math.pi * (norm + drift), min_panels=max(64, n_r // 16))
        radial = w * bump.phi(r)
        shift = np.asarray(centers(r), dtype=float) @ x
        phase = np.exp(-2j * np.pi * (shift[None, :] + np.outer(theta @ x, r)))
        out[i] = (phase @ radial).mean()
    return complex(out[0]) if single else out


def sphere_surface_hat(d: int, xi, n_theta: int = 64):
    """Transform of normalized surface measure on the unit sphere S^{d-1}."""
    xi, single = _frequencies(xi, d)
    out = np.empty(len(xi), dtype=complex)
    for i, x in enumerate(xi):
        theta = quasi_uniform_sphere(d, theta_nodes_for(float(np.linalg.norm(x)), n_theta))
        out[i] = np.exp(-2j * np.pi * (theta @ x)).mean()
    return complex(out[0]) if single else out


def cone_measure_spec(d: int, m: int, bump: BumpProfile | None = None) -> KakeyaMeasureSpec:
    """Unit segments from the origin along the 45-degree rays of the light cone.

    Their union is the cone ``{(x, |x|)}`` truncated at distance 1 from the apex.
    """
    if d < 3:
        raise BadDimensions("the cone needs d >= 3")
    if m < 64:
        raise ValueError("need m >= 64 rays")
    orient = nondegenerate_sphere_measure(d, np.eye(d)[-1], math.pi / 4, m, seed=0)
    return assign_translations(orient, "zero", bump=bump)
