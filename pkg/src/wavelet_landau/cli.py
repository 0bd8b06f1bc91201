"""Command-line front end: ``wavelet-landau <command> [options]``.

Every command writes its report (and any data export) under
``<out>/<command>/`` and exits with 0 on pass, 1 on a numeric failure and
2 on a usage or I/O error.  Output carries no timestamps, so reruns with the
same options reproduce the files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import haar, inverse, landau
from .filters import FilterBank, default_tol, format_filter, make_filter, read_filter, verify_qmf
from .quadrature import QuadratureError
from .zak import CELL, check_boundary, format_kq

PROG = "wavelet-landau"
THREADS_ENV = "WAVELET_LANDAU_THREADS"
MIN_GRID = 8

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    filter: str
    L: int
    grid: tuple[int, int, int]
    tol: float | None
    out: Path
    format: str
    sites: int = 4
    level: int = 0
    m: int = 0
    n: int = 0
    extent: float = 4.0

    def echo(self) -> str:
        tol = "default" if self.tol is None else f"{self.tol:.15g}"
        g = ",".join(str(v) for v in self.grid)
        return f"command={self.command} filter={self.filter} L={self.L} grid={g} tol={tol} format={self.format}"


def _num(v):
    """Round to 15 significant digits for output."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [_num(v.real), _num(v.imag)]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if not np.isfinite(v) else float(f"{v:.15g}")
    if isinstance(v, dict):
        return {str(k): _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_num(x) for x in v]
    return v


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.15g} {v.imag:.15g}"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15g}"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


class Report:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.items: list[tuple[str, object]] = []
        self.tables: list[tuple[str, list[str], list[tuple]]] = []

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    def table(self, name: str, columns: list[str], rows: list[tuple]) -> None:
        self.tables.append((name, columns, rows))

    def render(self, passed: bool) -> str:
        if self.cfg.format == "structured":
            doc = {
                "command": self.cfg.command,
                "config": self.cfg.echo(),
                "passed": passed,
                "results": {k: _num(v) for k, v in self.items},
                "tables": {
                    name: {"columns": cols, "rows": [_num(list(r)) for r in rows]} for name, cols, rows in self.tables
                },
            }
            return json.dumps(doc, indent=2, sort_keys=False) + "\n"
        lines = [f"# {PROG} {self.cfg.command}", f"# {self.cfg.echo()}"]
        lines += [f"{k}: {_fmt(v)}" for k, v in self.items]
        lines.append(f"passed: {_fmt(passed)}")
        for name, cols, rows in self.tables:
            lines.append("")
            lines.append(f"[{name}]")
            lines.append(" ".join(cols))
            lines += [" ".join(_fmt(x) for x in r) for r in rows]
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# helpers


def _resolve_filter(spec: str) -> FilterBank:
    try:
        return make_filter(spec)
    except ValueError:
        pass
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"filter {spec!r} is neither a builtin (haar, d4, d6) nor a readable file")
    try:
        return read_filter(path)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _mapper() -> Callable:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return map
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be a positive integer") from exc
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer")
    if n == 1:
        return map

    def pooled(fn, items):
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(fn, items))

    return pooled


def _outdir(cfg: RunConfig) -> Path:
    d = cfg.out / cfg.command
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {d}: {exc}") from exc
    return d


def _write(cfg: RunConfig, report: Report, passed: bool, extra: dict[str, str] | None = None) -> None:
    d = _outdir(cfg)
    suffix = "json" if cfg.format == "structured" else "txt"
    text = report.render(passed)
    try:
        (d / f"report.{suffix}").write_text(text)
        for name, body in (extra or {}).items():
            (d / name).write_text(body)
    except OSError as exc:
        raise UsageError(f"cannot write output: {exc}") from exc
    sys.stdout.write(text)


def _tol(cfg: RunConfig, default: float) -> float:
    return default if cfg.tol is None else cfg.tol


# --------------------------------------------------------------------------
# commands


def cmd_verify_filter(cfg: RunConfig) -> int:
    fb = _resolve_filter(cfg.filter)
    tol = cfg.tol if cfg.tol is not None else default_tol(fb)
    rep = verify_qmf(fb, tol)
    r = Report(cfg)
    r.add("filter", fb.name)
    r.add("taps", len(fb))
    r.add("tol", tol)
    for key, value in rep.as_dict().items():
        if key not in ("tol", "passed"):
            r.add(key, value)
    _write(cfg, r, rep.passed, {"filter.txt": format_filter(fb, header=f"filter={fb.name}")})
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_overlaps(cfg: RunConfig) -> int:
    fb = _resolve_filter(cfg.filter)
    tol = _tol(cfg, 1e-8)
    lat = landau.LatticeSpec(cfg.L)
    line = landau.filter_line_function(fb, cfg.L)
    t = landau.filter_kq_function(fb, cfg.L, cfg.grid[0], cfg.grid[1])
    mapper = _mapper()
    by_line = landau.overlap_table(line, lat.M, mapper=mapper)
    by_cell = landau.overlap_table(t, lat.M, mapper=mapper)
    agree = max(abs(by_line.entries[k] - by_cell.entries[k]) for k in by_line.entries)
    J = landau.sublattice_criterion(t, lat.M)
    bnd = check_boundary(t)
    off = landau.overlap_line(line, 0, 1)
    r = Report(cfg)
    r.add("filter", fb.name)
    r.add("M", lat.M)
    r.add("max_dev_line", by_line.max_dev)
    r.add("max_dev_kq", by_cell.max_dev)
    r.add("line_kq_agreement", agree)
    r.add("J_target", J.target)
    r.add("J_max_dev", J.max_dev)
    r.add("boundary_residual", bnd.max_residual)
    r.add("S_0_1_informational", off)
    rows = [(m, n, s, d) for m, n, s, d in by_line.rows()]
    r.table("overlaps", ["m", "n", "re", "im", "|S-delta|"], rows)
    passed = by_line.max_dev <= tol and by_cell.max_dev <= tol
    export = "# m n re im |S-delta|\n" + "".join(f"{m} {n} {_fmt(s)} {_fmt(d)}\n" for m, n, s, d in rows)
    _write(cfg, r, passed, {"overlaps.txt": export, "kq.txt": format_kq(t)})
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_invert(cfg: RunConfig) -> int:
    fb = _resolve_filter(cfg.filter)
    tol = _tol(cfg, 1e-10)
    rt = inverse.filter_roundtrip(fb, cfg.L)
    t = landau.filter_kq_function(fb, cfg.L, cfg.grid[0], cfg.grid[1])
    sums = []
    for k in rt.ks:
        for l in (0, 1, 2):
            sums.append((float(k), l, inverse.mra_condition_sum(t, l, float(k))))
    qmf_dev = max(abs(s - (1.0 if l == 0 else 0.0)) for _, l, s in sums)
    r = Report(cfg)
    r.add("filter", fb.name)
    r.add("roundtrip_max_dev", rt.max_dev)
    r.add("k_variation", rt.k_variation)
    r.add("qmf_sum_max_dev", qmf_dev)
    r.table("qmf_sums", ["k", "l", "re", "im"], sums)
    extra = {}
    for i, k in enumerate(rt.ks):
        ex = inverse.extract_filter(t, float(k), n_window=max(abs(rt.indices[0]), abs(rt.indices[-1])))
        extra[f"extracted_{i}.txt"] = ex.format()
    passed = rt.max_dev <= tol and qmf_dev <= tol and rt.k_variation <= tol
    _write(cfg, r, passed, extra)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_grid(cfg: RunConfig) -> int:
    fb = _resolve_filter(cfg.filter)
    line = landau.filter_line_function(fb, cfg.L)
    orb = landau.LandauOrbital(line, cfg.level, cfg.m, cfg.n)
    xs = np.linspace(-cfg.extent, cfg.extent, cfg.grid[2])
    body = landau.format_wavefunction_grid(orb, xs, xs)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    psi = landau.synthesize(orb, xx, yy)
    base = landau.synthesize(landau.LandauOrbital(line, cfg.level), xx + cfg.m * CELL, yy + cfg.n * CELL)
    covariance = float(np.max(np.abs(np.abs(psi) - np.abs(base))))
    r = Report(cfg)
    r.add("filter", fb.name)
    r.add("level", cfg.level)
    r.add("translate", [cfg.m, cfg.n])
    r.add("points", int(psi.size))
    r.add("max_abs", float(np.max(np.abs(psi))))
    r.add("modulus_covariance_dev", covariance)
    passed = covariance <= _tol(cfg, 1e-12)
    _write(cfg, r, passed, {"wavefunction.txt": body})
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_haar_compare(cfg: RunConfig) -> int:
    tol = _tol(cfg, 1e-6)
    n = cfg.grid[2]
    tab = haar.compare_with_quadrature(n)
    wav = haar.compare_with_quadrature(n, which="wavelet")
    dropped = haar.compare_with_quadrature(n, drop_phase=True)
    loc = haar.localization_compare()
    xs = (4.0, 6.0, 8.0)
    r = Report(cfg)
    r.add("grid_points", n * n)
    r.add("max_rel_err", tab.max_rel_err)
    r.add("max_complex_err", tab.max_complex_err)
    r.add("phase_discrepancy", tab.phase_discrepancy)
    r.add("wavelet_max_rel_err", wav.max_rel_err)
    r.add("wavelet_phase_discrepancy", wav.phase_discrepancy)
    r.add("drop_phase_max_rel_err", dropped.max_rel_err)
    r.add("asym_ratio_x4_6_8", list(haar.asymptotic_ratios(xs)))
    r.add("drop_phase_asym_ratio_x4_6_8", list(haar.asymptotic_ratios(xs, drop_phase=True)))
    r.add("wavelet_asym_ratio_x4_6_8", list(haar.asymptotic_ratios(xs, which="wavelet")))
    r.add("x_slope_haar", loc.x_slope_haar)
    r.add("x_slope_wavelet", loc.x_slope_wavelet)
    r.add("y_slope_haar", loc.y_slope_haar)
    r.add("y_slope_wavelet", loc.y_slope_wavelet)
    terms = [
        (label, i, abs(complex(t)))
        for label, flag in (("corrected", False), ("drop-phase", True))
        for i, t in enumerate(haar.haar_asymptotic_terms(6.0, 0.0, flag))
    ]
    r.table("asymptote_terms_at_6_0", ["form", "term", "abs"], terms)
    passed = tab.max_rel_err <= tol and wav.max_rel_err <= tol
    _write(
        cfg,
        r,
        passed,
        {
            "comparison.txt": tab.format("orbital=haar-T2"),
            "wavelet_comparison.txt": wav.format("orbital=haar-wavelet"),
        },
    )
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_slater(cfg: RunConfig) -> int:
    fb = _resolve_filter(cfg.filter)
    tol = _tol(cfg, 1e-8)
    lat = landau.LatticeSpec(cfg.L)
    line = landau.filter_line_function(fb, cfg.L)
    sites = landau.sublattice_sites(cfg.sites, lat.M)
    rep = landau.gram_slater(line, sites)
    r = Report(cfg)
    r.add("filter", fb.name)
    r.add("sites", [list(s) for s in rep.sites])
    r.add("abs_det", rep.det)
    r.add("det_dev", abs(rep.det - 1.0))
    rows = [(i, j, rep.gram[i, j]) for i in range(len(sites)) for j in range(len(sites))]
    r.table("gram", ["i", "j", "re", "im"], rows)
    passed = abs(rep.det - 1.0) <= tol
    _write(cfg, r, passed)
    return EXIT_PASS if passed else EXIT_FAIL


COMMANDS = {
    "verify-filter": cmd_verify_filter,
    "overlaps": cmd_overlaps,
    "invert": cmd_invert,
    "grid": cmd_grid,
    "haar-compare": cmd_haar_compare,
    "slater": cmd_slater,
}


# --------------------------------------------------------------------------
# argument parsing


def _grid(text: str) -> tuple[int, int, int]:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be N or Nk,Nq,Nxy: {text!r}") from exc
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be N or Nk,Nq,Nxy")
    if min(parts) < MIN_GRID:
        raise argparse.ArgumentTypeError(f"grid sizes must be >= {MIN_GRID}")
    return tuple(parts)


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--filter", default="haar", help="builtin (haar, d4, d6) or 'n re im' file")
    common.add_argument("--L", type=_positive_int, default=1, help="filling 1/(2L)")
    common.add_argument("--grid", type=_grid, default=None, help="N or Nk,Nq,Nxy (each >= 8)")
    common.add_argument("--tol", type=_positive_float, default=None)
    common.add_argument("--out", type=Path, default=Path("out"))
    common.add_argument("--format", choices=("table", "structured"), default="table")

    parser = argparse.ArgumentParser(prog=PROG, description="Wavelet filter banks and lowest-Landau-level orbitals.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-filter", parents=[common], help="QMF residuals of a filter bank")
    sub.add_parser("overlaps", parents=[common], help="sublattice overlap table and J criterion")
    sub.add_parser("invert", parents=[common], help="extract taps back from the kq function")
    g = sub.add_parser("grid", parents=[common], help="export a wavefunction on an x-y grid")
    g.add_argument("--level", type=int, choices=(0, 1), default=0)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--n", type=int, default=0)
    g.add_argument("--extent", type=_positive_float, default=4.0)
    sub.add_parser("haar-compare", parents=[common], help="closed forms vs quadrature for Haar orbitals")
    s = sub.add_parser("slater", parents=[common], help="Gram determinant of a sublattice family")
    s.add_argument("--sites", type=_positive_int, default=4)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    default_grid = (64, 64, 21)
    return RunConfig(
        command=ns.command,
        filter=ns.filter,
        L=ns.L,
        grid=ns.grid or default_grid,
        tol=ns.tol,
        out=ns.out,
        format=ns.format,
        sites=getattr(ns, "sites", 4),
        level=getattr(ns, "level", 0),
        m=getattr(ns, "m", 0),
        n=getattr(ns, "n", 0),
        extent=getattr(ns, "extent", 4.0),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    cfg = _config(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"{PROG}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
