"""Closed-form lowest-Landau-level wavefunctions for Haar data.

Two orbitals are treated:

* the Haar filter image ``T_2(w) = (1 + exp(-i a w)) / sqrt(2 a)`` on
  ``[0, a)``, whose wavefunction is a pair of error-function differences;
* the Haar mother wavelet (``+1`` on ``[0, 1/2)``, ``-1`` on ``[1/2, 1)``),
  the earlier wavelet-based orbital, written ``H00`` below.

Both decay like ``exp(-x**2/2)`` along ``x`` but only algebraically (after
the Gaussian factor is peeled off) along ``y``.  Asymptotic pole expansions
valid for ``|x - i y| >> 1`` are provided for each, together with a
comparison against direct quadrature synthesis.

``drop_phase=True`` drops the factor ``exp(i a x + a y - pi)`` in front of the
second error-function pair of the ``T_2`` expression (and switches to the
matching asymptote).  That variant disagrees with quadrature and is kept only
as a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .erf import erf_difference
from .filters import make_filter
from .landau import LandauOrbital, filter_line_function, synthesize
from .zak import CELL, LineFunction

__all__ = [
    "ASYMPTOTIC_RADIUS",
    "AsymptoticRegionError",
    "haar_closed",
    "haar_asymptotic",
    "haar_asymptotic_terms",
    "wavelet_closed",
    "wavelet_asymptotic",
    "haar_mother_line",
    "haar_orbital",
    "wavelet_orbital",
    "ComparisonTable",
    "compare_with_quadrature",
    "asymptotic_ratios",
    "LocalizationReport",
    "localization_compare",
]

ASYMPTOTIC_RADIUS = 3.0
_S2 = math.sqrt(2.0)
_SQRT_A = math.sqrt(CELL)


class AsymptoticRegionError(ValueError):
    """Point lies inside ``|x - i y| < 3`` where the pole expansions are not meant to hold."""


def _xy(x, y):
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def _squeeze(v):
    return complex(v) if np.ndim(v) == 0 else v


def haar_closed(x, y, drop_phase: bool = False):
    """Wavefunction of the Haar ``T_2`` orbital through error functions."""
    x, y = _xy(x, y)
    pre = _SQRT_A * np.exp(-0.5j * x * y - 0.5 * y * y) / (4.0 * math.pi**0.75)
    first = erf_difference((x + CELL - 1j * y) / _S2, (x - 1j * y) / _S2)
    second = erf_difference((x + CELL - 1j * (y - CELL)) / _S2, (x - 1j * (y - CELL)) / _S2)
    if not drop_phase:
        second = second * np.exp(1j * CELL * x + CELL * y - math.pi)
    return _squeeze(pre * (first + second))


def _require_asymptotic(x, y):
    if np.any(np.hypot(x, y) < ASYMPTOTIC_RADIUS):
        raise AsymptoticRegionError(f"asymptotic forms need |x - i y| >= {ASYMPTOTIC_RADIUS}")


def haar_asymptotic_terms(x, y, drop_phase: bool = False):
    """The four pole terms of the ``T_2`` asymptote (without the common prefactor)."""
    x, y = _xy(x, y)
    _require_asymptotic(x, y)
    s = x - 1j * y
    damp = np.exp(-math.pi - CELL * s)
    if drop_phase:
        return (
            1.0 / s,
            np.exp(math.pi - 1j * CELL * s) / (x - 1j * (y - CELL)),
            -damp / (x + CELL - 1j * y),
            -np.exp(-CELL * s * (1 + 1j)) / (x + CELL - 1j * (y - CELL)),
        )
    return (
        1.0 / s,
        1.0 / (x - 1j * (y - CELL)),
        -damp / (x + CELL - 1j * y),
        -damp / (x + CELL - 1j * (y - CELL)),
    )


def haar_asymptotic(x, y, drop_phase: bool = False):
    """Large-``|x - i y|`` expansion of :func:`haar_closed`."""
    x, y = _xy(x, y)
    terms = haar_asymptotic_terms(x, y, drop_phase)
    pre = _SQRT_A * np.exp(0.5j * x * y - 0.5 * x * x) / (2.0**1.5 * math.pi**1.25)
    return _squeeze(pre * sum(terms))


def wavelet_closed(x, y):
    """Wavefunction of the Haar mother-wavelet orbital ``H00``."""
    x, y = _xy(x, y)
    s = x - 1j * y
    pre = np.exp(-0.5j * x * y - 0.5 * y * y) / (2.0 * math.pi**0.25)
    u0, u1, u2 = s / _S2, (s + 0.5) / _S2, (s + 1.0) / _S2
    return _squeeze(pre * (erf_difference(u1, u0) - erf_difference(u2, u1)))


def wavelet_asymptotic(x, y):
    """Three-pole expansion of :func:`wavelet_closed`."""
    x, y = _xy(x, y)
    _require_asymptotic(x, y)
    s = x - 1j * y
    pre = np.exp(0.5j * x * y - 0.5 * x * x) / (2.0 * math.pi**0.25) * math.sqrt(2.0 / math.pi)
    poles = 1.0 / s + np.exp(-0.5 - s) / (s + 1.0) - 2.0 * np.exp(-0.125 - 0.5 * s) / (s + 0.5)
    return _squeeze(pre * poles)


def haar_mother_line() -> LineFunction:
    def psi(w):
        w = np.asarray(w, dtype=float)
        return np.where(w < 0.5, 1.0, -1.0) + 0j

    return LineFunction.compact(psi, 0.0, 1.0, label="haar-wavelet")


def haar_orbital() -> LandauOrbital:
    return LandauOrbital(filter_line_function(make_filter("haar"), 1))


def wavelet_orbital() -> LandauOrbital:
    return LandauOrbital(haar_mother_line())


# --------------------------------------------------------------------------
# comparisons


@dataclass(frozen=True, eq=False)
class ComparisonTable:
    """Closed form vs quadrature (and asymptote where valid) on a square grid."""

    x: np.ndarray
    y: np.ndarray
    closed: np.ndarray
    quad: np.ndarray
    asym: np.ndarray  # NaN inside the non-asymptotic disc

    @property
    def rel_err(self) -> np.ndarray:
        return np.abs(np.abs(self.closed) - np.abs(self.quad)) / np.abs(self.quad)

    @property
    def max_rel_err(self) -> float:
        return float(np.max(self.rel_err))

    @property
    def phase_discrepancy(self) -> float:
        """Largest ``|arg(closed / quad)|``: measured, not asserted."""
        return float(np.max(np.abs(np.angle(self.closed * np.conj(self.quad)))))

    @property
    def max_complex_err(self) -> float:
        return float(np.max(np.abs(self.closed - self.quad) / np.abs(self.quad)))

    def format(self, header: str = "") -> str:
        lines = [f"# {h}" for h in header.splitlines()] if header else []
        lines.append("# x y absClosed absQuad absAsym relErr")
        for x, y, c, q, s, r in zip(
            self.x.ravel(), self.y.ravel(), self.closed.ravel(), self.quad.ravel(),
            self.asym.ravel(), self.rel_err.ravel(),
        ):
            lines.append(f"{x:.15g} {y:.15g} {abs(c):.15g} {abs(q):.15g} {abs(s):.15g} {r:.15g}")
        return "\n".join(lines) + "\n"


def compare_with_quadrature(
    n: int = 21, lo: float = -3.0, hi: float = 3.0, which: str = "haar", drop_phase: bool = False
) -> ComparisonTable:
    """Tabulate ``which`` (``"haar"`` or ``"wavelet"``) on an ``n x n`` grid."""
    g = np.linspace(lo, hi, n)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    if which == "haar":
        closed = haar_closed(xx, yy, drop_phase)
        quad = synthesize(haar_orbital(), xx, yy, tol=1e-11)
        asym_fn = lambda X, Y: haar_asymptotic(X, Y, drop_phase)  # noqa: E731
    elif which == "wavelet":
        closed = wavelet_closed(xx, yy)
        quad = synthesize(wavelet_orbital(), xx, yy, tol=1e-11)
        asym_fn = wavelet_asymptotic
    else:
        raise ValueError(f"unknown orbital {which!r}")
    outside = np.hypot(xx, yy) >= ASYMPTOTIC_RADIUS
    asym = np.full(xx.shape, np.nan, dtype=complex)
    if np.any(outside):
        asym[outside] = asym_fn(xx[outside], yy[outside])
    return ComparisonTable(xx, yy, np.asarray(closed), np.asarray(quad), asym)


def asymptotic_ratios(xs=(4.0, 6.0, 8.0), y: float = 0.0, which: str = "haar", drop_phase: bool = False) -> np.ndarray:
    """``|asymptote| / |closed form|`` along a horizontal ray."""
    xs = np.asarray(xs, dtype=float)
    if which == "haar":
        return np.abs(haar_asymptotic(xs, y, drop_phase)) / np.abs(haar_closed(xs, y, drop_phase))
    if which == "wavelet":
        return np.abs(wavelet_asymptotic(xs, y)) / np.abs(wavelet_closed(xs, y))
    raise ValueError(f"unknown orbital {which!r}")


@dataclass(frozen=True, eq=False)
class LocalizationReport:
    x_slope_haar: float
    x_slope_wavelet: float
    y_slope_haar: float
    y_slope_wavelet: float
    y_growth_wavelet: np.ndarray  # |H00(0, v)| exp(v**2/4)
    x_decay_wavelet: np.ndarray  # |H00(v, 0)| exp(v**2/4)
    probes: np.ndarray

    @property
    def gaussian_in_x(self) -> bool:
        return all(abs(s + 0.5) <= 0.05 for s in (self.x_slope_haar, self.x_slope_wavelet))

    @property
    def slow_in_y(self) -> bool:
        return abs(self.y_slope_haar) < 0.1 and abs(self.y_slope_wavelet) < 0.1

    @property
    def wavelet_monotone(self) -> bool:
        return bool(np.all(np.diff(self.y_growth_wavelet) > 0) and np.all(np.diff(self.x_decay_wavelet) < 0))


def _slope(v, mags) -> float:
    return float(np.polyfit(v * v, np.log(mags), 1)[0])


def localization_compare(lo: float = 3.0, hi: float = 6.0, n: int = 31, probes=(2.0, 4.0, 6.0)) -> LocalizationReport:
    """Least-squares slopes of ``log|psi|`` against ``x**2`` and ``y**2`` on ``[lo, hi]``."""
    v = np.linspace(lo, hi, n)
    p = np.asarray(probes, dtype=float)
    zero = np.zeros_like(v)
    return LocalizationReport(
        _slope(v, np.abs(haar_closed(v, zero))),
        _slope(v, np.abs(wavelet_closed(v, zero))),
        _slope(v, np.abs(haar_closed(zero, v))),
        _slope(v, np.abs(wavelet_closed(zero, v))),
        np.abs(wavelet_closed(np.zeros_like(p), p)) * np.exp(p * p / 4),
        np.abs(wavelet_closed(p, np.zeros_like(p))) * np.exp(p * p / 4),
        p,
    )
