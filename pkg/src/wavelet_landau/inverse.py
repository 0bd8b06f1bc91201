"""Recovering filter coefficients from a kq function.

For a kq function ``h`` on the cell, ``h_n(k) = int_0^a exp(i n a q) h(k, q) dq``
are the Fourier coefficients of ``h(k, .)`` in ``q``.  When
``|h(k, q/2)|**2 + |h(k, (q + a)/2)|**2 = 1/pi`` they obey the filter
identities ``sum_n h_n(k) conj(h_{n+2l}(k)) = delta_{l,0}`` for every ``k``.

The normalisation here is exactly the one that inverts
:func:`wavelet_landau.landau.filter_kq`: extracting from the kq image of a
filter bank at ``L = 1`` returns the taps themselves (constant 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .filters import FilterBank, format_filter, require_qmf
from .landau import LatticeSpec, filter_kq_function
from .quadrature import panel_nodes
from .zak import CELL, KqFunction

__all__ = [
    "TailError",
    "ExtractedFilter",
    "RoundtripReport",
    "extract_coefficient",
    "extract_filter",
    "mra_condition_sum",
    "k_variation",
    "filter_roundtrip",
    "sample_k",
    "write_extracted",
]

SIGNIFICANT = 1e-14
WINDOW_PAD = 8
MAX_SEARCH = 64


class TailError(ValueError):
    """Coefficients at the edge of the index window are not negligible."""


def sample_k(count: int = 8) -> np.ndarray:
    """``count`` evenly spaced momenta in ``[0, a)``, offset from the grid origin."""
    return (np.arange(count) + 0.5) * (CELL / count)


def extract_coefficient(h: KqFunction, n, k):
    """``h_n(k)``.  Broadcasts over ``n`` and ``k``.

    With a closed-form evaluator the ``q`` integral uses Gauss-Legendre panels
    fine enough for ``exp(i n a q)``; a grid-only function is summed with the
    rectangle rule on its own ``q`` grid (``k`` must then lie on the grid).
    """
    n = np.asarray(n)
    k = np.asarray(k, dtype=float)
    n, k = np.broadcast_arrays(n, k)
    if h.has_evaluator:
        top = float(np.max(np.abs(n))) if n.size else 0.0
        panels = max(8, int(math.ceil(CELL * (top * CELL + 24.0) / 3.0)))
        q, w = panel_nodes(0.0, CELL, panels)
        vals = h(k[..., None], q)
        return np.sum(w * np.exp(1j * n[..., None] * CELL * q) * vals, axis=-1)
    ik = np.rint(k / (CELL / h.n_k)).astype(int)
    if np.any(np.abs(ik * (CELL / h.n_k) - k) > 1e-12):
        raise ValueError("grid-only kq function: k must lie on the k grid")
    rows = h.values[ik % h.n_k]
    q = h.q_grid
    return np.sum(np.exp(1j * n[..., None] * CELL * q) * rows, axis=-1) * (CELL / h.n_q)


@dataclass(frozen=True, eq=False)
class ExtractedFilter:
    k: float
    coeffs: dict
    n_range: tuple

    def as_filter(self) -> FilterBank:
        lo, hi = self.n_range
        taps = [self.coeffs[n] for n in range(lo, hi + 1)]
        return FilterBank(np.asarray(taps, dtype=complex), lo, f"extracted(k={self.k:.15g})")

    def qmf_sum(self, l: int) -> complex:
        return complex(
            sum(c * np.conj(self.coeffs[n + 2 * l]) for n, c in self.coeffs.items() if n + 2 * l in self.coeffs)
        )

    def format(self) -> str:
        return format_filter(sorted(self.coeffs.items()), header=f"k={self.k:.15g}")


def write_extracted(ex: ExtractedFilter, path: str | Path) -> None:
    Path(path).write_text(ex.format())


def _auto_window(h: KqFunction, k: float) -> int:
    n = np.arange(-MAX_SEARCH, MAX_SEARCH + 1)
    mags = np.abs(extract_coefficient(h, n, k))
    sig = np.nonzero(mags > SIGNIFICANT)[0]
    last = int(np.max(np.abs(n[sig]))) if sig.size else 0
    window = last + WINDOW_PAD
    if window > MAX_SEARCH:
        raise TailError(f"coefficients still above {SIGNIFICANT:g} at |n| = {last}")
    return window


def extract_filter(h: KqFunction, k: float, n_window: int | None = None) -> ExtractedFilter:
    """All coefficients ``h_n(k)`` with ``|n| <= n_window`` (automatic window by default)."""
    W = _auto_window(h, k) if n_window is None else int(n_window)
    n = np.arange(-W, W + 1)
    vals = extract_coefficient(h, n, k)
    return ExtractedFilter(float(k), {int(i): complex(v) for i, v in zip(n, vals)}, (-W, W))


def mra_condition_sum(
    h: KqFunction, l: int, k: float, n_window: int | None = None, tail_tol: float = 1e-10
) -> complex:
    """``sum_n h_n(k) conj(h_{n+2l}(k))`` over the index window.

    Raises :class:`TailError` if the outermost coefficients exceed ``tail_tol``.
    """
    ex = extract_filter(h, k, n_window)
    W = ex.n_range[1]
    edge = max(abs(ex.coeffs[-W]), abs(ex.coeffs[W]))
    if edge > tail_tol:
        raise TailError(f"|h_n(k)| = {edge:.2e} at the window edge |n| = {W}")
    return ex.qmf_sum(int(l))


def k_variation(h: KqFunction, n: Iterable[int], ks: Iterable[float]) -> float:
    """Largest spread ``max_k |h_n(k) - h_n(k_0)|`` over the given indices."""
    n = np.asarray(list(n))
    ks = np.asarray(list(ks), dtype=float)
    vals = extract_coefficient(h, n[None, :], ks[:, None])
    return float(np.max(np.abs(vals - vals[0])))


@dataclass(frozen=True, eq=False)
class RoundtripReport:
    name: str
    L: int
    ks: np.ndarray
    recovered: np.ndarray  # (len(ks), len(indices))
    expected: np.ndarray
    indices: np.ndarray

    @property
    def max_dev(self) -> float:
        return float(np.max(np.abs(self.recovered - self.expected)))

    @property
    def k_variation(self) -> float:
        return float(np.max(np.abs(self.recovered - self.recovered[0])))


def filter_roundtrip(fb: FilterBank, L: int = 1, k_count: int = 8, pad: int = 4) -> RoundtripReport:
    """Build the kq function of ``fb`` and extract the taps back at ``k_count`` momenta.

    At stride ``L`` the tap ``h_l`` reappears at index ``l L``; all other
    indices must vanish.
    """
    LatticeSpec(L)
    require_qmf(fb)
    t = filter_kq_function(fb, L)
    idx = np.arange(fb.n_min * L - pad, fb.n_max * L + pad + 1)
    expected = np.zeros(idx.shape, dtype=complex)
    for i, n in enumerate(idx):
        if n % L == 0:
            expected[i] = fb.tap(n // L)
    ks = sample_k(k_count)
    recovered = extract_coefficient(t, idx[None, :], ks[:, None])
    return RoundtripReport(fb.name, L, ks, recovered, expected, idx)
