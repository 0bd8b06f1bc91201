"""Gauss-Legendre panels and Gauss-Hermite rules used by the Landau-level integrals."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureError",
    "legendre_rule",
    "hermite_rule",
    "panel_nodes",
    "gaussian_nodes",
]


class QuadratureError(RuntimeError):
    """Estimated quadrature error exceeds the requested tolerance."""


@lru_cache(maxsize=None)
def legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


@lru_cache(maxsize=None)
def hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and *scaled* weights ``w_j * exp(u_j**2)``.

    With these, ``sum(ws * F(u))`` approximates ``int F(u) du`` for any ``F``
    that behaves like ``exp(-u**2)`` times something smooth.
    """
    u, w = np.polynomial.hermite.hermgauss(order)
    ws = w * np.exp(u * u)
    u.setflags(write=False)
    ws.setflags(write=False)
    return u, ws


def panel_nodes(lo, hi, n_panels: int, order: int = 16):
    """Composite Gauss-Legendre nodes on ``[lo, hi]`` (broadcast over ``lo``/``hi``).

    Returns ``(x, w)`` with a trailing node axis of length ``n_panels * order``.
    Empty intervals (``hi <= lo``) get zero weights.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = np.maximum(hi - lo, 0.0)
    t, w = legendre_rule(order)
    base = (np.arange(n_panels)[:, None] + t[None, :]).ravel() / n_panels
    wts = np.tile(w, n_panels) / n_panels
    x = lo[..., None] + width[..., None] * base
    return x, width[..., None] * wts


def gaussian_nodes(center, sigma: float, order: int):
    """Nodes/weights for ``int F(p) dp`` when ``F ~ exp(-(p - center)**2 / (2 sigma**2))``."""
    u, ws = hermite_rule(order)
    scale = np.sqrt(2.0) * sigma
    center = np.asarray(center, dtype=float)
    return center[..., None] + scale * u, scale * ws * np.ones(center.shape + (1,))
