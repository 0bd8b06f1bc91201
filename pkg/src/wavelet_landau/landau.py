"""Single-electron orbitals in the lowest and first Landau levels.

An orbital is fixed by a reduced function ``h(P)`` on the line.  Its
configuration-space wavefunction (symmetric gauge, unit magnetic length) is

    level 0:  psi(x, y) = exp(i x y / 2) / (sqrt(2) pi**0.75)
                          * int exp(i y P) exp(-(x + P)**2 / 2) h(P) dP
    level 1:  psi(x, y) = i exp(-i x y / 2) / pi**0.75
                          * int exp(i y P) exp(-P**2 / 2) P h(P - x) dP

Magnetic translations by lattice vectors of the square lattice with
``a**2 = 2*pi`` act as

    psi_{m,n}(x, y) = (-1)**(m n) exp(i a (m y - n x) / 2) psi(x + m a, y + n a)

and the overlaps ``S_{m,n} = <psi, psi_{m,n}>`` reduce to one-dimensional
integrals of ``h`` (line form) or to cell integrals of ``|h(k, q)|**2``
(kq form).  A filling ``1/M`` asks for orthonormality only on the
``(1, 0), (0, M)`` sublattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .filters import FilterBank, require_qmf
from .quadrature import QuadratureError, gaussian_nodes, hermite_rule, panel_nodes
from .zak import CELL, DEFAULT_GRID, KqFunction, LineFunction

__all__ = [
    "LatticeSpec",
    "LandauOrbital",
    "OverlapReport",
    "SublatticeReport",
    "SlaterReport",
    "LevelEquivalenceReport",
    "filter_line_function",
    "filter_kq",
    "filter_kq_function",
    "sublattice_criterion",
    "synthesize",
    "magnetic_translate",
    "overlap_line",
    "overlap_kq",
    "overlap_table",
    "sublattice_sites",
    "gram_slater",
    "level_one_overlap",
    "level_one_equivalence",
    "direct_overlap",
    "format_wavefunction_grid",
]

_SQRT_A = math.sqrt(CELL)
_PI34 = math.pi**0.75
_KERNEL_RADIUS = 10.0  # exp(-R**2/2) ~ 2e-22
_GH_FINE, _GH_COARSE = 96, 64
_CHUNK = 1 << 21


@dataclass(frozen=True)
class LatticeSpec:
    """Square lattice of spacing ``a = sqrt(2 pi)`` at filling ``1/(2L)``."""

    L: int = 1

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError("L must be a positive integer")

    a = CELL

    @property
    def M(self) -> int:
        return 2 * self.L

    @property
    def filling(self) -> float:
        return 1.0 / self.M


# --------------------------------------------------------------------------
# filter bank -> line function -> kq function


def filter_line_function(fb: FilterBank, L: int = 1, tol: float | None = None) -> LineFunction:
    """``(1/sqrt a) sum_l h_l exp(-i l w L a)`` on ``[0, a)``, zero elsewhere.

    Unit norm whenever ``fb`` satisfies the QMF identities.
    """
    LatticeSpec(L)
    require_qmf(fb, tol)
    idx = fb.indices.astype(float)
    coeffs = fb.coeffs

    def T(w):
        w = np.asarray(w, dtype=float)
        ph = np.exp(-1j * np.multiply.outer(w, idx) * (L * CELL))
        return ph @ coeffs / _SQRT_A

    bw = L * CELL * float(np.max(np.abs(idx)))
    return LineFunction.compact(T, 0.0, CELL, bandwidth=bw, label=f"T[{fb.name},L={L}]")


def filter_kq(fb: FilterBank, L: int, k, q):
    """Zak transform of :func:`filter_line_function` in closed form.

    On the cell it is ``T(q)/sqrt(a)`` (independent of ``k``); elsewhere the
    boundary conditions extend it: ``exp(i k j a) T(q - j a)/sqrt(a)`` with
    ``j = floor(q/a)``.
    """
    k, q = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(q, dtype=float))
    j = np.floor(q / CELL)
    q0 = q - j * CELL
    idx = fb.indices.astype(float)
    ph = np.exp(-1j * q0[..., None] * idx * (L * CELL))
    T = (ph @ fb.coeffs) / _SQRT_A
    return np.exp(1j * k * j * CELL) * T / _SQRT_A


def filter_kq_function(fb: FilterBank, L: int = 1, n_k: int = DEFAULT_GRID, n_q: int = DEFAULT_GRID) -> KqFunction:
    LatticeSpec(L)
    require_qmf(fb)
    return KqFunction.from_function(lambda k, q: filter_kq(fb, L, k, q), n_k, n_q, label=f"t[{fb.name},L={L}]")


@dataclass(frozen=True, eq=False)
class SublatticeReport:
    field: np.ndarray
    M: int

    @property
    def target(self) -> float:
        return self.M / (2.0 * math.pi)

    @property
    def max_dev(self) -> float:
        return float(np.max(np.abs(self.field - self.target)))


def sublattice_criterion(h: KqFunction, M: int, n_k: int | None = None, n_q: int | None = None) -> SublatticeReport:
    """``sum_{j<M} |h(k, (q + j a)/M)|**2`` on the cell grid; constant ``M/2pi`` iff
    the stride-``M`` translates are orthonormal."""
    if M < 1:
        raise ValueError("M must be >= 1")
    n_k = n_k or h.n_k
    n_q = n_q or h.n_q
    k = np.arange(n_k) * (CELL / n_k)
    q = np.arange(n_q) * (CELL / n_q)
    kk, qq = np.meshgrid(k, q, indexing="ij")
    total = np.zeros(kk.shape)
    for j in range(M):
        total += np.abs(h(kk, (qq + j * CELL) / M)) ** 2
    return SublatticeReport(total, M)


# --------------------------------------------------------------------------
# configuration-space wavefunctions


def magnetic_translate(func: Callable, m: int, n: int) -> Callable:
    """``(x, y) -> (-1)**(m n) exp(i a (m y - n x)/2) func(x + m a, y + n a)``."""
    m, n = int(m), int(n)
    if m == 0 and n == 0:
        return func
    sign = -1.0 if (m * n) % 2 else 1.0

    def translated(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        phase = sign * np.exp(0.5j * CELL * (m * y - n * x))
        return phase * func(x + m * CELL, y + n * CELL)

    return translated


def _combine_gaussians(mu1, var1, mu2, var2):
    var = var1 * var2 / (var1 + var2)
    mu = (mu1 * var2 + mu2 * var1) / (var1 + var2)
    return mu, math.sqrt(var)


def _compact_window(line: LineFunction, level: int, x: np.ndarray):
    if level == 0:
        lo = np.maximum(line.lo, -x - _KERNEL_RADIUS)
        hi = np.minimum(line.hi, -x + _KERNEL_RADIUS)
    else:
        lo = np.maximum(x + line.lo, -_KERNEL_RADIUS)
        hi = np.minimum(x + line.hi, _KERNEL_RADIUS)
    return lo, hi


def _kernel(line: LineFunction, level: int, P, x, y):
    if level == 0:
        return np.exp(1j * y * P - 0.5 * (x + P) ** 2) * line(P)
    return np.exp(1j * y * P - 0.5 * P * P) * P * line(P - x)


def _raw_integral(line: LineFunction, level: int, x, y, rule):
    P, w = rule
    return np.sum(w * _kernel(line, level, P, x[:, None], y[:, None]), axis=1)


def _hermite_orders(omega: float) -> tuple[int, int]:
    """Gauss-Hermite orders resolving ``exp(i omega u)`` against ``exp(-u**2)``."""
    coarse = max(_GH_COARSE, int(math.ceil(omega * omega / 3.0)))
    coarse = min(coarse, 600)
    return coarse + max(32, coarse // 2), coarse


def _level_integral(line: LineFunction, level: int, x: np.ndarray, y: np.ndarray):
    """Integral part of the wavefunction and its error estimate (flat arrays)."""
    if line.is_compact:
        lo, hi = _compact_window(line, level, x)
        width = float(np.max(np.maximum(hi - lo, 0.0))) if x.size else 0.0
        freq = float(np.max(np.abs(y))) if y.size else 0.0
        panels = max(4, int(math.ceil(width * (freq + line.bandwidth + 6.0) / 3.0)))
        fine = _raw_integral(line, level, x, y, panel_nodes(lo, hi, 2 * panels))
        coarse = _raw_integral(line, level, x, y, panel_nodes(lo, hi, panels))
    else:
        var = line.scale**2
        if level == 0:
            mu, sig = _combine_gaussians(-x, 1.0, line.center, var)
        else:
            mu, sig = _combine_gaussians(0.0, 1.0, x + line.center, var)
        fine_order, coarse_order = _hermite_orders(float(np.max(np.abs(y))) * math.sqrt(2.0) * sig)
        fine = _raw_integral(line, level, x, y, gaussian_nodes(mu, sig, fine_order))
        coarse = _raw_integral(line, level, x, y, gaussian_nodes(mu, sig, coarse_order))
    return fine, np.abs(fine - coarse)


def _base_wavefunction(line: LineFunction, level: int, x, y, tol: float):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()
    out = np.empty(xf.shape, dtype=complex)
    err = np.empty(xf.shape)
    step = max(1, _CHUNK // 400)
    for s in range(0, xf.size, step):
        sl = slice(s, s + step)
        out[sl], err[sl] = _level_integral(line, level, xf[sl], yf[sl])
    if level == 0:
        pref = np.exp(0.5j * xf * yf) / (math.sqrt(2.0) * _PI34)
    else:
        pref = 1j * np.exp(-0.5j * xf * yf) / _PI34
    out *= pref
    err *= np.abs(pref)
    worst = float(np.max(err)) if err.size else 0.0
    if worst > tol:
        raise QuadratureError(f"wavefunction quadrature error estimate {worst:.2e} exceeds {tol:.1e}")
    return out.reshape(shape)


@dataclass(frozen=True, eq=False)
class LandauOrbital:
    """Landau level ``level`` (0 or 1), reduced function ``line``, translate ``(m, n)``."""

    line: LineFunction
    level: int = 0
    m: int = 0
    n: int = 0
    norm_tol: float = 1e-8

    def __post_init__(self):
        if self.level not in (0, 1):
            raise ValueError("only Landau levels 0 and 1 are supported")
        nrm = self.line.norm_squared()
        if abs(nrm - 1.0) > self.norm_tol:
            raise ValueError(f"reduced function is not normalised (|h|^2 = {nrm:.12g})")

    def translated(self, m: int, n: int) -> "LandauOrbital":
        # magnetic translations on the a**2 = 2 pi lattice commute, so indices add
        return LandauOrbital(self.line, self.level, self.m + int(m), self.n + int(n), self.norm_tol)

    def __call__(self, x, y, tol: float = 1e-9):
        return synthesize(self, x, y, tol)


def synthesize(orb: LandauOrbital, x, y, tol: float = 1e-9):
    """Evaluate the orbital's wavefunction at ``(x, y)`` (broadcast)."""

    def base(X, Y):
        return _base_wavefunction(orb.line, orb.level, X, Y, tol)

    return magnetic_translate(base, orb.m, orb.n)(x, y)


def format_wavefunction_grid(orb: LandauOrbital, xs, ys) -> str:
    xx, yy = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), indexing="ij")
    psi = synthesize(orb, xx, yy)
    lines = [
        f"# level={orb.level} m={orb.m} n={orb.n} h={orb.line.label}",
        "# x y re im abs",
    ]
    for x, y, v in zip(xx.ravel(), yy.ravel(), psi.ravel()):
        lines.append(f"{x:.15g} {y:.15g} {v.real:.15g} {v.imag:.15g} {abs(v):.15g}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# overlaps


def _overlap_integrand(line: LineFunction, m: int, n: int, p):
    return np.exp(1j * n * CELL * p) * np.conj(line(p + m * CELL)) * line(p)


def overlap_line(line: LineFunction, m: int, n: int, tol: float = 1e-12) -> complex:
    """``S_{m,n} = int exp(i n a p) conj(h(p + m a)) h(p) dp``.

    Disjoint supports give an exact zero without quadrature.
    """
    m, n = int(m), int(n)
    if line.is_compact:
        lo = max(line.lo, line.lo - m * CELL)
        hi = min(line.hi, line.hi - m * CELL)
        if hi <= lo:
            return 0j
        freq = abs(n) * CELL + 2.0 * line.bandwidth + 1.0
        panels = max(4, int(math.ceil((hi - lo) * freq / 3.0)))
        rules = [panel_nodes(lo, hi, 2 * panels), panel_nodes(lo, hi, panels)]
    else:
        mu = line.center - 0.5 * m * CELL
        sig = line.scale / math.sqrt(2.0)
        rules = [gaussian_nodes(mu, sig, _GH_FINE), gaussian_nodes(mu, sig, _GH_COARSE)]
    fine, coarse = (complex(np.sum(w * _overlap_integrand(line, m, n, p))) for p, w in rules)
    if abs(fine - coarse) > tol:
        raise QuadratureError(f"S[{m},{n}] quadrature error estimate {abs(fine - coarse):.2e}")
    return fine


def overlap_kq(h: KqFunction, m: int, n: int) -> complex:
    """``S_{m,n} = int_cell exp(i n a q - i k m a) |h(k, q)|**2 dk dq`` (rectangle rule)."""
    k = h.k_grid[:, None]
    q = h.q_grid[None, :]
    ph = np.exp(1j * (n * CELL * q - m * CELL * k))
    return complex(np.sum(ph * np.abs(h.values) ** 2) * (CELL / h.n_k) * (CELL / h.n_q))


@dataclass(frozen=True, eq=False)
class OverlapReport:
    """Overlaps ``S_{m, M n}`` for ``|m|, |n| <= radius`` keyed by lattice offsets ``(m, M n)``."""

    entries: dict
    M: int
    radius: int
    method: str
    extra: dict = field(default_factory=dict)

    @staticmethod
    def target(key) -> float:
        return 1.0 if key == (0, 0) else 0.0

    def deviation(self, key) -> float:
        return abs(self.entries[key] - self.target(key))

    @property
    def max_dev(self) -> float:
        return max(self.deviation(key) for key in self.entries)

    def rows(self):
        for (m, n), s in sorted(self.entries.items()):
            yield m, n, s, self.deviation((m, n))


def overlap_table(
    source: LineFunction | KqFunction,
    M: int,
    radius: int = 3,
    mapper: Callable = map,
) -> OverlapReport:
    """Sublattice overlaps from a line function (line form) or a kq function (cell form).

    ``mapper`` lets callers parallelise the independent entries; results keep
    their input order.
    """
    keys = [(m, M * n) for m in range(-radius, radius + 1) for n in range(-radius, radius + 1)]
    if isinstance(source, KqFunction):
        fn, method = (lambda key: overlap_kq(source, *key)), "kq"
    else:
        fn, method = (lambda key: overlap_line(source, *key)), "line"
    values = list(mapper(fn, keys))
    return OverlapReport(dict(zip(keys, values)), M, radius, method)


def sublattice_sites(count: int, M: int) -> list[tuple[int, int]]:
    """The first ``count`` sites ``(m, M n)`` of the stride-``M`` sublattice, filled square by square."""
    if count < 1:
        raise ValueError("need at least one site")
    side = int(math.ceil(math.sqrt(count)))
    sites = [(m, M * n) for n in range(side) for m in range(side)]
    sites.sort(key=lambda s: (max(abs(s[0]), abs(s[1]) // M), s[1], s[0]))
    return sites[:count]


@dataclass(frozen=True, eq=False)
class SlaterReport:
    sites: tuple
    gram: np.ndarray

    @property
    def det(self) -> float:
        """``|det G|``: squared norm of the unnormalised Slater determinant."""
        return float(abs(np.linalg.det(self.gram)))


def gram_slater(line: LineFunction, sites: Sequence[tuple[int, int]], tol: float = 1e-12) -> SlaterReport:
    """Gram matrix ``G_ij = S_{m_i - m_j, n_i - n_j}`` of magnetically translated orbitals.

    The many-electron determinant built from these orbitals has norm
    ``det G``, which is 1 exactly when the family is orthonormal.
    """
    sites = tuple((int(m), int(n)) for m, n in sites)
    if not sites:
        raise ValueError("need at least one site")
    if len(set(sites)) != len(sites):
        raise ValueError("duplicate sites")
    cache: dict = {}
    N = len(sites)
    G = np.empty((N, N), dtype=complex)
    for i, (mi, ni) in enumerate(sites):
        for j, (mj, nj) in enumerate(sites):
            key = (mi - mj, ni - nj)
            if key not in cache:
                cache[key] = overlap_line(line, *key, tol=tol)
            G[i, j] = cache[key]
    return SlaterReport(sites, G)


# --------------------------------------------------------------------------
# first Landau level


def _reduced_level_one(line: LineFunction, m: int, n: int) -> complex:
    """Level-1 overlap after the ``y`` integral has been done exactly.

    ``(2/sqrt pi) int dP P**2 exp(-P**2) int dx exp(i n a (P - x))
    conj(h(P - x)) h(P - x - m a)``, evaluated as a tensor rule:
    Gauss-Hermite in ``P`` and, for every ``P`` node, a rule in ``x``.
    """
    u, ws = hermite_rule(_GH_FINE)
    w_p = ws * np.exp(-u * u)  # plain Gauss-Hermite weights
    P = u[:, None]
    if line.is_compact:
        lo = np.maximum(u - line.hi, u - m * CELL - line.hi)
        hi = np.minimum(u - line.lo, u - m * CELL - line.lo)
        if np.all(hi <= lo):
            return 0j
        freq = abs(n) * CELL + 2.0 * line.bandwidth + 1.0
        width = float(np.max(np.maximum(hi - lo, 0.0)))
        panels = max(4, int(math.ceil(width * freq / 3.0)))
        x, wx = panel_nodes(lo, hi, panels)
    else:
        mu = u - line.center - 0.5 * m * CELL
        x, wx = gaussian_nodes(mu, line.scale / math.sqrt(2.0), _GH_FINE)
    r = P - x
    inner = np.sum(wx * np.exp(1j * n * CELL * r) * np.conj(line(r)) * line(r - m * CELL), axis=1)
    return complex(2.0 / math.sqrt(math.pi) * np.sum(w_p * u * u * inner))


def direct_overlap(line: LineFunction, level: int, m: int, n: int, tol: float = 1e-9) -> complex:
    """``<psi, psi_{m,n}>`` by a trapezoid rule on an (x, y) box; decaying ``h`` only."""
    if line.is_compact:
        raise ValueError("direct 2-D overlap needs a Gaussian-decay reduced function")
    s = line.scale
    wx = math.sqrt(1.0 + s * s)
    wy = wx / s
    step = 0.2 * min(wx, wy)
    xc = [-line.center, -line.center - m * CELL] if level == 0 else [-line.center, -line.center - m * CELL, line.center]
    x0, x1 = min(xc) - 10 * wx, max(xc) + 10 * wx
    y0, y1 = min(0.0, -n * CELL) - 10 * wy, max(0.0, -n * CELL) + 10 * wy
    xs = np.arange(x0, x1 + step, step)
    ys = np.arange(y0, y1 + step, step)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    orb = LandauOrbital(line, level)
    a = synthesize(orb, xx, yy, tol)
    b = synthesize(orb.translated(m, n), xx, yy, tol)
    return complex(np.sum(np.conj(a) * b) * step * step)


def level_one_overlap(line: LineFunction, m: int, n: int, method: str = "reduced", tol: float = 1e-9) -> complex:
    """Overlap ``<psi, psi_{m,n}>`` of first-Landau-level orbitals built on ``line``.

    ``method="reduced"`` integrates ``y`` exactly and does the remaining
    (x, P) integral numerically; ``method="direct"`` integrates the
    synthesised wavefunctions on an (x, y) grid.
    """
    if method == "reduced":
        return _reduced_level_one(line, int(m), int(n))
    if method == "direct":
        return direct_overlap(line, 1, int(m), int(n), tol)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True, eq=False)
class LevelEquivalenceReport:
    level_one: dict
    level_zero: dict

    @property
    def max_dev(self) -> float:
        return max(abs(self.level_one[k] - self.level_zero[k]) for k in self.level_one)


def level_one_equivalence(
    line: LineFunction, pairs: Iterable[tuple[int, int]], method: str = "reduced"
) -> LevelEquivalenceReport:
    """Compare first-level overlaps with the lowest-level line-form overlaps."""
    nrm = line.norm_squared()
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError("reduced function must be normalised")
    pairs = [(int(m), int(n)) for m, n in pairs]
    one = {p: level_one_overlap(line, *p, method=method) for p in pairs}
    zero = {p: overlap_line(line, *p) for p in pairs}
    return LevelEquivalenceReport(one, zero)
