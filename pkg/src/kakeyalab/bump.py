"""The mollifier ``phi(x) = c exp(-1/(x(1-x)))`` on [0, 1] and its Fourier transform.

``phi`` is symmetric about 1/2, so ``phi_hat(u) = exp(-i pi u) A(u)`` with a
real, even amplitude ``A``.  The amplitude is tabulated once on a uniform
frequency grid (a zero-padded FFT of trapezoid samples, which is accurate to
round-off because every derivative of ``phi`` vanishes at both endpoints) and
interpolated with a cubic spline.  Frequencies beyond the table use composite
Gauss-Legendre quadrature directly.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

GL_ORDER = 8


def _raw_bump(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (xi * (1.0 - xi)))
    return out


@lru_cache(maxsize=None)
def _gl_rule(order: int):
    return np.polynomial.legendre.leggauss(order)


def panel_nodes(n_panels: int, order: int = GL_ORDER, a: float = 0.0, b: float = 1.0):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    t, w = _gl_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = np.diff(edges)[:, None] / 2.0
    mid = (edges[:-1] + edges[1:])[:, None] / 2.0
    return (mid + half * t).ravel(), (half * w).ravel()


def panels_for(u: float, max_width: float = 1.0 / 64) -> int:
    """Panel count giving widths <= min(1/(4(1+|u|)), max_width)."""
    width = min(1.0 / (4.0 * (1.0 + abs(u))), max_width)
    return int(math.ceil(1.0 / width))


def oscillatory_nodes(omega: float, order: int = 16, min_panels: int = 64):
    """Panel rule on [0, 1] for integrands oscillating at angular frequency ``omega``.

    Panels keep ``omega * half_width <= 6``, where a 16-point rule is accurate
    to about 1e-11.
    """
    return panel_nodes(max(min_panels, math.ceil(abs(omega) / 12.0)), order)


def _bump_integral() -> float:
    x, w = panel_nodes(256, order=20)
    return float(w @ _raw_bump(x))


BUMP_INTEGRAL = _bump_integral()


class BumpProfile:
    """Normalized bump with a cached Fourier transform.

    Parameters
    ----------
    u_max : largest tabulated frequency.
    h : frequency step of the table.
    order : Gauss-Legendre order per panel for direct evaluation.
    """

    def __init__(self, u_max: float = 4096.0, h: float = 1.0 / 64, order: int = GL_ORDER):
        self.normalization = 1.0 / BUMP_INTEGRAL
        self.u_max = float(u_max)
        self.h = float(h)
        self.order = int(order)
        spline = self._build_table()
        # per-interval cubic coefficients, highest power first
        self._coef = np.ascontiguousarray(spline.c.T)
        self._n_int = self._coef.shape[0]

    def phi(self, x):
        """Bump value; zero outside (0, 1)."""
        out = self.normalization * _raw_bump(x)
        return out if np.ndim(x) else float(out)

    def _build_table(self) -> CubicSpline:
        n_freq = int(round(self.u_max / self.h)) + 1
        # node count N: aliases sit at |u + jN| >= N - u_max, where phi_hat is negligible
        n_nodes = 1 << max(12, math.ceil(math.log2(4 * self.u_max + 1024)))
        pad = int(round(1.0 / self.h))
        length = n_nodes * pad
        while length < n_freq:
            length *= 2
        x = np.arange(n_nodes) / n_nodes
        samples = np.zeros(length)
        samples[:n_nodes] = self.phi(x) / n_nodes
        # frequency index m of the FFT corresponds to u = m n_nodes / length
        spectrum = np.fft.fft(samples)
        step = length // (n_nodes * pad)
        vals = spectrum[: n_freq * step: step][:n_freq]
        u = np.arange(n_freq) * self.h
        amp = (vals * np.exp(1j * np.pi * u)).real
        return CubicSpline(u, amp)

    def amplitude(self, u) -> np.ndarray:
        """Real amplitude ``A(|u|)`` with ``phi_hat(u) = exp(-i pi u) A(u)``."""
        a = np.abs(np.asarray(u, dtype=float))
        inside = a <= self.u_max
        if inside.all():
            return self._interp(a)
        out = np.empty_like(a)
        out[inside] = self._interp(a[inside])
        if not inside.all():
            far = a[~inside]
            out[~inside] = [self.direct_amplitude(v) for v in far]
        return out

    def _interp(self, a: np.ndarray) -> np.ndarray:
        s = a * (1.0 / self.h)
        i = np.minimum(s.astype(np.intp), self._n_int - 1)
        t = (s - i) * self.h
        c = self._coef[i]
        return ((c[..., 0] * t + c[..., 1]) * t + c[..., 2]) * t + c[..., 3]

    def phi_hat(self, u):
        """Fourier transform ``int_0^1 phi(x) exp(-2 pi i u x) dx``."""
        scalar = np.ndim(u) == 0
        u = np.atleast_1d(np.asarray(u, dtype=float))
        a = np.abs(u)
        amp = self.amplitude(a)
        # phase from |u| keeps phi_hat(-u) == conj(phi_hat(u)) bit for bit
        arg = np.pi * a
        out = np.empty(u.shape, dtype=complex)
        out.real = amp * np.cos(arg)
        im = amp * np.sin(arg)
        np.negative(im, where=u > 0, out=im)
        out.imag = im
        return complex(out[0]) if scalar else out

    def abs_phi_hat(self, u):
        out = np.abs(self.amplitude(u))
        return out if np.ndim(u) else float(out)

    def direct_amplitude(self, u: float) -> float:
        x, w = panel_nodes(panels_for(u), self.order)
        return float(w @ (self.phi(x) * np.cos(2.0 * np.pi * u * (x - 0.5))))

    def phi_hat_direct(self, u: float) -> complex:
        """Panel quadrature of the transform, bypassing the table."""
        x, w = panel_nodes(panels_for(u), self.order)
        return complex(w @ (self.phi(x) * np.exp(-2j * np.pi * u * x)))

    def decay_constants(self, powers=(1, 2, 3, 4), lo: float = 1.0, hi: float = 1000.0,
                        n: int = 20001) -> dict[int, float]:
        """Measured ``C_N = max |u|^N |phi_hat(u)|`` over ``lo <= |u| <= hi``."""
        u = np.linspace(lo, hi, n)
        mag = self.abs_phi_hat(u)
        return {p: float(np.max(mag * u**p)) for p in powers}


@lru_cache(maxsize=4)
def default_bump() -> BumpProfile:
    return BumpProfile()
