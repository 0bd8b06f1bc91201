"""The kq (Zak) representation on the unit cell ``[0, a) x [0, a)`` with ``a**2 = 2*pi``.

Forward map::

    h(k, q) = a**-0.5 * sum_n exp(-i k n a) H(q + n a)

Inverse, for ``x`` in ``[0, a)``::

    H(x + n a) = a**-0.5 * int_0^a exp(i k n a) h(k, x) dk

Every kq function obeys ``h(k + a, q) = h(k, q)`` and
``h(k, q + a) = exp(i k a) h(k, q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .quadrature import gaussian_nodes, panel_nodes

__all__ = [
    "CELL",
    "LineFunction",
    "KqFunction",
    "BoundaryReport",
    "TruncationError",
    "zak_transform",
    "inverse_zak",
    "check_boundary",
    "format_kq",
    "write_kq",
]

CELL = math.sqrt(2.0 * math.pi)
DEFAULT_GRID = 64


class TruncationError(ValueError):
    """Requested truncation leaves a tail above tolerance."""


@dataclass(frozen=True, eq=False)
class LineFunction:
    """A complex function on the real line with a declared support or decay.

    ``kind == "compact"``: zero outside ``[lo, hi)``.
    ``kind == "gaussian"``: ``|f(x)| <= bound * exp(-(x - center)**2 / (2 scale**2))``.
    ``bandwidth`` is an upper bound on the angular frequencies present in a
    trigonometric-polynomial piece; quadrature uses it to size its panels.
    """

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "compact"
    lo: float = -math.inf
    hi: float = math.inf
    center: float = 0.0
    scale: float = 1.0
    bound: float = 1.0
    bandwidth: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("compact", "gaussian"):
            raise ValueError(f"unknown LineFunction kind {self.kind!r}")
        if self.kind == "compact" and not (
            math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo
        ):
            raise ValueError("compact LineFunction needs a finite interval lo < hi")
        if self.kind == "gaussian" and self.scale <= 0:
            raise ValueError("decay scale must be positive")

    @classmethod
    def compact(cls, func, lo: float, hi: float, bandwidth: float = 0.0, label: str = ""):
        return cls(func, "compact", float(lo), float(hi), bandwidth=float(bandwidth), label=label)

    @classmethod
    def gaussian(cls, func, center: float = 0.0, scale: float = 1.0, bound: float = 1.0, label: str = ""):
        return cls(func, "gaussian", center=float(center), scale=float(scale), bound=float(bound), label=label)

    @classmethod
    def normalized_gaussian(cls, center: float = 0.0, scale: float = 1.0):
        """``pi**-0.25 scale**-0.5 exp(-(x - center)**2 / (2 scale**2))``, unit L2 norm."""
        amp = math.pi**-0.25 / math.sqrt(scale)

        def f(x):
            x = np.asarray(x, dtype=float)
            return amp * np.exp(-((x - center) ** 2) / (2.0 * scale**2)) + 0j

        return cls.gaussian(f, center, scale, amp, label=f"gaussian(c={center:g},s={scale:g})")

    @classmethod
    def from_samples(cls, x, values, label: str = "sampled"):
        """Linear interpolation of samples; zero outside ``[x[0], x[-1])``."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(values, dtype=complex)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")

        def f(t):
            t = np.asarray(t, dtype=float)
            return np.interp(t, x, v.real) + 1j * np.interp(t, x, v.imag)

        return cls.compact(f, x[0], x[-1], label=label)

    @property
    def is_compact(self) -> bool:
        return self.kind == "compact"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=complex)
        out = np.broadcast_to(out, x.shape).copy()
        if self.is_compact:
            out[(x < self.lo) | (x >= self.hi)] = 0.0
        return out

    def decay_radius(self, tol: float) -> float:
        """Distance from the centre beyond which ``|f| < tol`` by the declared bound."""
        if self.is_compact:
            return max(abs(self.lo - self.center), abs(self.hi - self.center))
        if tol >= self.bound:
            return 0.0
        return self.scale * math.sqrt(2.0 * math.log(self.bound / tol))

    def norm_squared(self, order: int = 96) -> float:
        """Line quadrature of ``|f|**2``."""
        if self.is_compact:
            panels = max(8, int(math.ceil((self.hi - self.lo) * (2 * self.bandwidth + 4) / 3)))
            x, w = panel_nodes(self.lo, self.hi, panels, 16)
        else:
            x, w = gaussian_nodes(self.center, self.scale / math.sqrt(2.0), order)
        return float(np.sum(w * np.abs(self(x)) ** 2))


def _cell_grid(n: int) -> np.ndarray:
    return np.arange(n) * (CELL / n)


@dataclass(frozen=True, eq=False)
class KqFunction:
    """A kq-space function sampled on an ``n_k x n_q`` grid over the unit cell.

    ``evaluator(k, q)``, when present, evaluates anywhere in the extended
    plane.  ``extension`` optionally stores samples on ``[0, 2a) x [0, 2a)``
    (``2 n_k x 2 n_q``) for boundary checks of grid-only data.
    """

    values: np.ndarray
    evaluator: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    extension: Optional[np.ndarray] = field(default=None, repr=False)
    label: str = ""

    a = CELL

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2 or min(v.shape) < 1:
            raise ValueError("values must be a 2-D grid")
        object.__setattr__(self, "values", v)
        if self.extension is not None:
            e = np.asarray(self.extension, dtype=complex)
            if e.shape != (2 * v.shape[0], 2 * v.shape[1]):
                raise ValueError("extension must have shape (2 n_k, 2 n_q)")
            object.__setattr__(self, "extension", e)

    @classmethod
    def from_function(cls, func, n_k: int = DEFAULT_GRID, n_q: int = DEFAULT_GRID, label: str = ""):
        k, q = np.meshgrid(_cell_grid(n_k), _cell_grid(n_q), indexing="ij")
        return cls(np.asarray(func(k, q), dtype=complex), func, label=label)

    @classmethod
    def from_extended_grid(cls, ext, label: str = ""):
        ext = np.asarray(ext, dtype=complex)
        if ext.ndim != 2 or ext.shape[0] % 2 or ext.shape[1] % 2:
            raise ValueError("extended grid must have even shape")
        nk, nq = ext.shape[0] // 2, ext.shape[1] // 2
        return cls(ext[:nk, :nq].copy(), None, ext, label=label)

    @property
    def n_k(self) -> int:
        return self.values.shape[0]

    @property
    def n_q(self) -> int:
        return self.values.shape[1]

    @property
    def k_grid(self) -> np.ndarray:
        return _cell_grid(self.n_k)

    @property
    def q_grid(self) -> np.ndarray:
        return _cell_grid(self.n_q)

    @property
    def has_evaluator(self) -> bool:
        return self.evaluator is not None

    def __call__(self, k, q):
        k, q = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(q, dtype=float))
        if self.evaluator is not None:
            return np.asarray(self.evaluator(k, q), dtype=complex)
        return self._grid_lookup(k, q)

    def _grid_lookup(self, k, q):
        ik = k * self.n_k / CELL
        iq = q * self.n_q / CELL
        rk, rq = np.rint(ik), np.rint(iq)
        if np.any(np.abs(ik - rk) > 1e-8) or np.any(np.abs(iq - rq) > 1e-8):
            raise ValueError("grid-only KqFunction can only be read at grid points")
        rk = rk.astype(np.int64)
        rq = rq.astype(np.int64)
        if np.any((rk < 0) | (rk >= self.n_k) | (rq < 0) | (rq >= self.n_q)):
            raise ValueError("grid-only KqFunction can only be read inside the unit cell")
        return self.values[rk, rq]

    def extended_grid(self) -> np.ndarray:
        """Samples on ``[0, 2a) x [0, 2a)`` with the cell grid spacing."""
        if self.extension is not None:
            return self.extension
        if self.evaluator is None:
            raise ValueError("no extended evaluation available (no evaluator, no extension)")
        k = np.arange(2 * self.n_k) * (CELL / self.n_k)
        q = np.arange(2 * self.n_q) * (CELL / self.n_q)
        kk, qq = np.meshgrid(k, q, indexing="ij")
        return np.asarray(self.evaluator(kk, qq), dtype=complex)

    def cell_norm_squared(self) -> float:
        """Rectangle rule for ``int_cell |h|**2`` (spectral for smooth periodic ``|h|**2``)."""
        return float(np.sum(np.abs(self.values) ** 2) * (CELL / self.n_k) * (CELL / self.n_q))


def _n_range_compact(H: LineFunction, q: np.ndarray) -> np.ndarray:
    """Per-point translate indices hitting the support: shape ``q.shape + (count,)``."""
    first = np.floor((H.lo - q) / CELL).astype(np.int64)
    count = int(math.ceil((H.hi - H.lo) / CELL)) + 2
    return first[..., None] + np.arange(count)


def required_terms(H: LineFunction, tol: float) -> int:
    """Half-width of the translate window that keeps the declared tail below ``tol``."""
    if H.is_compact:
        return int(math.ceil((H.hi - H.lo) / CELL)) + 1
    radius = H.decay_radius(tol)
    return int(math.ceil(radius / CELL)) + 1


def zak_transform(
    H: LineFunction,
    n_k: int = DEFAULT_GRID,
    n_q: int = DEFAULT_GRID,
    n_max: int | None = None,
    tol: float = 1e-14,
) -> KqFunction:
    """Zak transform of ``H`` sampled on the cell grid, with an extended-plane evaluator.

    For decaying ``H`` the translate window is ``|n - n_c| <= n_max`` around the
    translate ``n_c`` nearest the decay centre; by default ``n_max`` is twice
    the count the declared bound requires.  Compactly supported ``H`` uses the
    exact set of translates meeting the support.
    """
    if n_k < 1 or n_q < 1:
        raise ValueError("grid sizes must be positive")
    if H.is_compact:

        def evaluator(k, q):
            k, q = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(q, dtype=float))
            n = _n_range_compact(H, q)
            terms = np.exp(-1j * k[..., None] * n * CELL) * H(q[..., None] + n * CELL)
            return terms.sum(axis=-1) / math.sqrt(CELL)

    else:
        need = required_terms(H, tol)
        if n_max is None:
            n_max = 2 * need
        elif n_max < need:
            raise TruncationError(
                f"n_max={n_max} leaves a tail above {tol:g}; at least {need} translates needed"
            )
        offsets = np.arange(-n_max, n_max + 1)

        def evaluator(k, q):
            k, q = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(q, dtype=float))
            nc = np.rint((H.center - q) / CELL).astype(np.int64)
            n = nc[..., None] + offsets
            terms = np.exp(-1j * k[..., None] * n * CELL) * H(q[..., None] + n * CELL)
            return terms.sum(axis=-1) / math.sqrt(CELL)

    return KqFunction.from_function(evaluator, n_k, n_q, label=f"Z[{H.label}]")


def inverse_zak(h: KqFunction, n, x):
    """``H(x + n a)`` for ``x`` in ``[0, a)`` by the rectangle rule on the k grid.

    ``h(., x)`` is ``a``-periodic in ``k``, so the rule is exact for every
    Fourier mode below ``n_k``.  Without an evaluator ``x`` must lie on the q grid.
    """
    n = np.asarray(n)
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x >= CELL)):
        raise ValueError("x must lie in [0, a)")
    k = h.k_grid
    n_b, x_b = np.broadcast_arrays(n, x)
    vals = h(k[None, :], x_b.reshape(-1)[:, None])  # (points, n_k)
    phase = np.exp(1j * np.multiply.outer(n_b.reshape(-1), k) * CELL)
    out = np.sum(phase * vals, axis=1) * (CELL / h.n_k) / math.sqrt(CELL)
    out = out.reshape(n_b.shape)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BoundaryReport:
    k_residual: float
    q_residual: float
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.k_residual, self.q_residual)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def check_boundary(h: KqFunction, tol: float = 1e-10) -> BoundaryReport:
    """Max over the cell grid of ``|h(k+a,q) - h(k,q)|`` and ``|h(k,q+a) - e^{ika} h(k,q)|``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ext = h.extended_grid()
    nk, nq = h.n_k, h.n_q
    base = ext[:nk, :nq]
    k = h.k_grid[:, None]
    k_res = float(np.max(np.abs(ext[nk:, :nq] - base)))
    q_res = float(np.max(np.abs(ext[:nk, nq:] - np.exp(1j * k * CELL) * base)))
    return BoundaryReport(k_res, q_res, float(tol))


def format_kq(h: KqFunction) -> str:
    lines = [f"# a={CELL:.15g} N_k={h.n_k} N_q={h.n_q}", "# k q re im"]
    k, q = h.k_grid, h.q_grid
    for i in range(h.n_k):
        for j in range(h.n_q):
            v = h.values[i, j]
            lines.append(f"{k[i]:.15g} {q[j]:.15g} {v.real:.15g} {v.imag:.15g}")
    return "\n".join(lines) + "\n"


def write_kq(h: KqFunction, path: str | Path) -> None:
    Path(path).write_text(format_kq(h))
