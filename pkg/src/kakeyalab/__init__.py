"""Numerical experiments on Fourier decay of measures on restricted (d,k)-sets."""

__version__ = "0.1.0"
