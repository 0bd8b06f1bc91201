"""Filter banks of a multi-resolution analysis.

A filter bank is the finite sequence ``h_n`` of the two-scale relation

    phi(x) = sqrt(2) * sum_n h_n phi(2x - n)

together with the index of its first tap.  Everything else (the low-pass
symbol, the scaling function, the mother wavelet) is derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "FilterBank",
    "QMFReport",
    "SampledFunction",
    "CascadeError",
    "BUILTIN_FILTERS",
    "make_filter",
    "verify_qmf",
    "lowpass_response",
    "cascade",
    "cascade_differences",
    "scaling_function",
    "mother_wavelet",
    "read_filter",
    "write_filter",
]

_SQ2 = math.sqrt(2.0)
_SQ3 = math.sqrt(3.0)
_SQ10 = math.sqrt(10.0)
_R6 = math.sqrt(5.0 + 2.0 * _SQ10)

# Real taps, first tap at n = 0, normalised so that sum(h) = sqrt(2).
BUILTIN_FILTERS: dict[str, tuple[float, ...]] = {
    "haar": (1.0 / _SQ2, 1.0 / _SQ2),
    "d4": tuple(
        v / (4.0 * _SQ2) for v in (1.0 + _SQ3, 3.0 + _SQ3, 3.0 - _SQ3, 1.0 - _SQ3)
    ),
    "d6": tuple(
        v / (16.0 * _SQ2)
        for v in (
            1.0 + _SQ10 + _R6,
            5.0 + _SQ10 + 3.0 * _R6,
            10.0 - 2.0 * _SQ10 + 2.0 * _R6,
            10.0 - 2.0 * _SQ10 - 2.0 * _R6,
            5.0 + _SQ10 - 3.0 * _R6,
            1.0 + _SQ10 - _R6,
        )
    ),
}

DEFAULT_BUILTIN_TOL = 1e-12
DEFAULT_USER_TOL = 1e-10
DEFAULT_DEPTH = 10


class CascadeError(RuntimeError):
    """The cascade iteration does not settle down."""


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Complex taps ``h_offset, ..., h_{offset+len-1}``."""

    coeffs: np.ndarray
    offset: int = 0
    name: str = "user"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("filter bank needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("filter coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", int(self.offset))

    def __len__(self) -> int:
        return self.coeffs.size

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + self.coeffs.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def is_builtin(self) -> bool:
        return self.name in BUILTIN_FILTERS

    def tap(self, n: int) -> complex:
        """``h_n``, zero outside the stored range."""
        if self.n_min <= n <= self.n_max:
            return complex(self.coeffs[n - self.n_min])
        return 0j

    def __repr__(self) -> str:
        return f"FilterBank(name={self.name!r}, offset={self.offset}, taps={len(self)})"


FilterSpec = Union[str, FilterBank, Sequence[complex]]


def make_filter(spec: FilterSpec, offset: int = 0, name: str | None = None) -> FilterBank:
    """Build a :class:`FilterBank` from a builtin name or an explicit sequence.

    Builtins are ``"haar"``, ``"d4"`` and ``"d6"`` (Daubechies, 2/4/6 taps).
    """
    if isinstance(spec, FilterBank):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key not in BUILTIN_FILTERS:
            raise ValueError(
                f"unknown builtin filter {spec!r}; choose from {sorted(BUILTIN_FILTERS)}"
            )
        return FilterBank(np.array(BUILTIN_FILTERS[key]), 0, key)
    coeffs = list(spec)
    if not coeffs:
        raise ValueError("empty coefficient list")
    return FilterBank(np.array(coeffs, dtype=complex), offset, name or "user")


def lowpass_response(fb: FilterBank, omega) -> np.ndarray | complex:
    """Low-pass symbol ``(1/sqrt 2) sum_n h_n exp(-i n omega)``, 2*pi periodic."""
    w = np.asarray(omega, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(w, fb.indices))
    out = phase @ fb.coeffs / _SQ2
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class QMFReport:
    """Residuals of the orthonormality identities a filter bank must satisfy.

    ``normalization``        | sum |h_n|^2 - 1 |
    ``shift_orthogonality``  max_k | sum_n h_n conj(h_{n+2k}) - delta_k0 |
    ``power_complementary``  max_w | |m(w)|^2 + |m(w+pi)|^2 - 1 | on the sample grid
    ``double_sum``           max_w of the same identity written as a double sum
                             over tap pairs with the (1 + (-1)^(l+n))/2 parity mask
    """

    normalization: float
    shift_orthogonality: float
    power_complementary: float
    double_sum: float
    tol: float
    n_omega: int

    @property
    def max_residual(self) -> float:
        return max(
            self.normalization,
            self.shift_orthogonality,
            self.power_complementary,
            self.double_sum,
        )

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def as_dict(self) -> dict:
        return {
            "normalization": self.normalization,
            "shift_orthogonality": self.shift_orthogonality,
            "power_complementary": self.power_complementary,
            "double_sum": self.double_sum,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "n_omega": self.n_omega,
            "passed": self.passed,
        }


def default_tol(fb: FilterBank) -> float:
    return DEFAULT_BUILTIN_TOL if fb.is_builtin else DEFAULT_USER_TOL


def verify_qmf(fb: FilterBank, tol: float | None = None, n_omega: int = 256) -> QMFReport:
    """Measure every QMF identity; never raises on a bad bank, only reports."""
    if tol is None:
        tol = default_tol(fb)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_omega < 256:
        raise ValueError("need at least 256 frequency samples")
    h = fb.coeffs
    n = len(h)

    norm_res = abs(float(np.sum(np.abs(h) ** 2)) - 1.0)

    shift_res = 0.0
    for k in range(0, (n + 1) // 2 + 1):
        s = np.sum(h[: n - 2 * k] * np.conj(h[2 * k :])) if 2 * k < n else 0.0
        shift_res = max(shift_res, abs(s - (1.0 if k == 0 else 0.0)))
        if k:
            # negative shifts are the conjugates of positive ones
            shift_res = max(shift_res, abs(np.conj(s)))

    omega = np.arange(n_omega) * (2.0 * math.pi / n_omega)
    m0 = lowpass_response(fb, omega)
    m1 = lowpass_response(fb, omega + math.pi)
    pc_res = float(np.max(np.abs(np.abs(m0) ** 2 + np.abs(m1) ** 2 - 1.0)))

    idx = fb.indices
    mask = 0.5 * (1.0 + (-1.0) ** (idx[:, None] + idx[None, :]))
    pair = h[:, None] * np.conj(h[None, :]) * mask  # rows n, columns l
    diff = idx[None, :] - idx[:, None]  # l - n
    phases = np.exp(1j * np.multiply.outer(omega, diff))
    dsum = np.einsum("wnl,nl->w", phases, pair)
    ds_res = float(np.max(np.abs(dsum - 1.0)))

    return QMFReport(norm_res, float(shift_res), pc_res, ds_res, float(tol), n_omega)


def require_qmf(fb: FilterBank, tol: float | None = None) -> None:
    rep = verify_qmf(fb, tol)
    if not rep.passed:
        raise ValueError(
            f"filter bank {fb.name!r} fails the QMF identities "
            f"(max residual {rep.max_residual:.3e} > tol {rep.tol:.1e})"
        )


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Piecewise-constant function: ``samples[i]`` on ``[origin + i*step, origin + (i+1)*step)``."""

    samples: np.ndarray
    step: float
    origin: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples)
        if self.step <= 0:
            raise ValueError("step must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def grid(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.samples.size)

    @property
    def support(self) -> tuple[float, float]:
        return self.origin, self.origin + self.step * self.samples.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pos = (x - self.origin) / self.step
        idx = np.floor(pos + 1e-9).astype(np.int64)
        ok = (idx >= 0) & (idx < self.samples.size)
        out = np.zeros(x.shape, dtype=self.samples.dtype)
        out[ok] = self.samples[idx[ok]]
        return out

    def integral(self):
        return np.sum(self.samples) * self.step

    def inner(self, other: "SampledFunction"):
        """``<self, other>`` (conjugate-linear in ``self``) for aligned grids."""
        if not math.isclose(self.step, other.step, rel_tol=1e-12):
            raise ValueError("grids have different steps")
        shift = (other.origin - self.origin) / self.step
        k = round(shift)
        if abs(shift - k) > 1e-6:
            raise ValueError("grids are not aligned")
        a, b = self.samples, other.samples
        # other.samples[j] sits at self index j + k
        lo = max(0, k)
        hi = min(a.size, b.size + k)
        if hi <= lo:
            return 0.0
        return np.sum(np.conj(a[lo:hi]) * b[lo - k : hi - k]) * self.step


def _cascade_step(h: np.ndarray, c: np.ndarray, j: int) -> np.ndarray:
    up = np.zeros((h.size - 1) * 2**j + 1, dtype=complex)
    up[:: 2**j] = h
    return _SQ2 * np.convolve(up, c)


def cascade(fb: FilterBank, depth: int) -> list[SampledFunction]:
    """All cascade iterates ``phi_0 .. phi_depth`` starting from the indicator of [0, 1).

    Iterate ``j`` is piecewise constant on a grid of step ``2**-j``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    h = fb.coeffs
    c = np.ones(1, dtype=complex)
    origin = 0.0
    out = [SampledFunction(c.copy(), 1.0, origin)]
    for j in range(depth):
        c = _cascade_step(h, c, j)
        origin = (origin + fb.n_min) / 2.0
        if not np.all(np.isfinite(c)):
            raise CascadeError(f"cascade overflowed at depth {j + 1}")
        out.append(SampledFunction(c, 2.0 ** -(j + 1), origin))
    return out


def _sup_diff(fine: SampledFunction, coarse: SampledFunction) -> float:
    x = coarse.grid + coarse.step / 4.0
    return float(np.max(np.abs(fine(x) - coarse.samples)))


def cascade_differences(fb: FilterBank, depth: int) -> np.ndarray:
    """``d[j] = sup |phi_{j+1} - phi_j|`` on the grid of ``phi_j``, j = 0..depth-1."""
    it = cascade(fb, depth)
    return np.array([_sup_diff(it[j + 1], it[j]) for j in range(depth)])


def _check_convergence(diffs: np.ndarray, fb: FilterBank) -> None:
    if diffs.size < 3:
        return
    tail = diffs[-3:]
    if tail[-1] > 1e-12 and tail[-1] > tail[-2] * (1.0 + 1e-9):
        raise CascadeError(
            f"cascade for {fb.name!r} is not converging: successive differences "
            + ", ".join(f"{d:.3e}" for d in tail)
        )


def _real_if_possible(s: SampledFunction) -> SampledFunction:
    if np.all(np.abs(s.samples.imag) <= 1e-15 * max(1.0, np.max(np.abs(s.samples)))):
        return SampledFunction(s.samples.real.copy(), s.step, s.origin)
    return s


def scaling_function(fb: FilterBank, depth: int = DEFAULT_DEPTH) -> SampledFunction:
    """Cascade approximation of the scaling function on a grid of step ``2**-depth``.

    Raises :class:`CascadeError` when successive iterates drift apart.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    require_qmf(fb)
    its = cascade(fb, max(depth, 4))
    diffs = np.array([_sup_diff(its[j + 1], its[j]) for j in range(len(its) - 1)])
    _check_convergence(diffs, fb)
    return _real_if_possible(its[depth])


def mother_wavelet(fb: FilterBank, depth: int = DEFAULT_DEPTH) -> SampledFunction:
    """Mother wavelet ``sqrt(2) sum_n (-1)^n conj(h_{1-n}) phi(2x - n)``.

    ``phi`` is the depth-1 cascade iterate, so the result lives on the same
    ``2**-depth`` grid as :func:`scaling_function` and is exactly orthogonal
    to it in grid quadrature.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    require_qmf(fb)
    its = cascade(fb, max(depth, 4))
    diffs = np.array([_sup_diff(its[j + 1], its[j]) for j in range(len(its) - 1)])
    _check_convergence(diffs, fb)
    phi = its[depth - 1]
    step = 2.0**-depth
    n_lo, n_hi = 1 - fb.n_max, 1 - fb.n_min
    lo = (phi.origin + n_lo) / 2.0
    hi = (phi.support[1] + n_hi) / 2.0
    count = int(round((hi - lo) / step))
    x = lo + step * np.arange(count) + step / 4.0
    psi = np.zeros(count, dtype=complex)
    for n in range(n_lo, n_hi + 1):
        psi += (-1) ** (n % 2) * np.conj(fb.tap(1 - n)) * phi(2.0 * x - n)
    return _real_if_possible(SampledFunction(_SQ2 * psi, step, lo))


def read_filter(path: str | Path) -> FilterBank:
    """Parse ``n re im`` lines (``#`` comments allowed); indices must be consecutive."""
    path = Path(path)
    rows = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}: expected 'n re im', got {line!r}")
        rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
    if not rows:
        raise ValueError(f"{path}: no coefficients")
    rows.sort()
    idx = [r[0] for r in rows]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise ValueError(f"{path}: indices must be consecutive and distinct")
    coeffs = np.array([complex(r[1], r[2]) for r in rows])
    return FilterBank(coeffs, idx[0], path.stem)


def format_filter(fb_or_taps: FilterBank | Iterable[tuple[int, complex]], header: str = "") -> str:
    if isinstance(fb_or_taps, FilterBank):
        taps = zip(fb_or_taps.indices.tolist(), fb_or_taps.coeffs.tolist())
    else:
        taps = fb_or_taps
    lines = [f"# {line}" for line in header.splitlines()] if header else []
    for n, c in taps:
        c = complex(c)
        lines.append(f"{n} {c.real:.15g} {c.imag:.15g}")
    return "\n".join(lines) + "\n"


def write_filter(fb: FilterBank, path: str | Path, header: str = "") -> None:
    Path(path).write_text(format_filter(fb, header))
