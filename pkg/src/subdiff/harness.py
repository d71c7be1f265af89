"""Convergence sweeps, error/rate reporting, and report serialization.

A sweep runs the selected scheme over a grid of (alpha, level) cells,
measures the maximum-norm error against the exact solution,

    e = max_{i,j} |U_i^j - u(x_i, t_j)|,

and forms rates log2(e_coarse / e_fine) between consecutive levels where
the finer level doubles both M and N.  Reports serialize to CSV (full
precision, machine readable) or Markdown (5 significant digits, table
layout for eyeballing).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InvalidArgumentError, SubdiffError
from .integral_scheme import SolutionGrid, solve
from .l1 import PREPROCESSED, STANDARD, l1_solve, make_l1_config
from .meshes import build_spatial_mesh, build_three_piece_mesh
from .problems import ExactSolution, decompose, example_problem

INTEGRAL = "integral"

DEFAULT_LEVELS = ((64, 64), (128, 128), (256, 256), (512, 512), (1024, 1024))

CSV_HEADER = "scheme,alpha,M,N,r,max_error,rate,wall_time_s"


@dataclass(frozen=True)
class SweepConfig:
    """One convergence study: schemes x alphas x mesh levels."""

    alphas: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8)
    levels: tuple[tuple[int, int], ...] = DEFAULT_LEVELS
    scheme: str = INTEGRAL
    r_override: Optional[float] = None
    T: float = 1.0
    output_format: str = "csv"
    output_path: Optional[str] = None
    seed: int = 0
    workers: int = 1
    problem_factory: Callable[[float], tuple] = example_problem

    def __post_init__(self):
        if self.scheme not in (INTEGRAL, STANDARD, PREPROCESSED):
            raise InvalidArgumentError(f"unknown scheme {self.scheme!r}")
        if self.output_format not in ("csv", "md"):
            raise InvalidArgumentError(f"unknown output format {self.output_format!r}")
        if self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")
        if not self.alphas:
            raise InvalidArgumentError("need at least one alpha")
        if not self.levels:
            raise InvalidArgumentError("need at least one (M, N) level")
        levels = tuple((int(m), int(n)) for m, n in self.levels)
        if list(levels) != sorted(levels):
            raise InvalidArgumentError("levels must be sorted ascending")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))


@dataclass
class ReportRow:
    scheme: str
    alpha: float
    M: int
    N: int
    r: Optional[float]
    max_error: Optional[float]  # None marks a failed cell
    rate: Optional[float]
    wall_time_s: float
    message: str = ""


@dataclass
class ConvergenceReport:
    rows: list[ReportRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(row.max_error is not None for row in self.rows)


def max_error(grid: SolutionGrid, exact: ExactSolution) -> float:
    """Maximum pointwise error over all space-time grid nodes."""
    x = grid.smesh.nodes
    worst = 0.0
    for j, tj in enumerate(grid.tmesh.nodes):
        u = np.asarray(exact.u(x, float(tj)), dtype=float)
        worst = max(worst, float(np.max(np.abs(grid.U[:, j] - u))))
    return worst


def rate(e_coarse: float, e_fine: float) -> float:
    """Observed convergence rate log2(e_coarse / e_fine)."""
    if e_coarse <= 0.0 or e_fine <= 0.0:
        raise DomainError(f"rates need positive errors, got {e_coarse}, {e_fine}")
    return math.log2(e_coarse / e_fine)


def _solve_cell(config: SweepConfig, alpha: float, M: int, N: int) -> ReportRow:
    problem, exact = config.problem_factory(alpha)
    if abs(problem.T - config.T) > 1e-12 * max(1.0, config.T):
        raise InvalidArgumentError(
            f"problem horizon {problem.T} does not match configured T={config.T}"
        )
    start = time.perf_counter()
    if config.scheme == INTEGRAL:
        smesh = build_spatial_mesh(problem.l, M)
        tmesh = build_three_piece_mesh(alpha, problem.T, N)
        decomposed = decompose(problem, smesh)
        grid = solve(problem, decomposed, tmesh, smesh)
        r_used = None
    else:
        cfg = make_l1_config(problem, config.scheme, M, N, r=config.r_override)
        grid = l1_solve(cfg)
        r_used = cfg.r
    err = max_error(grid, exact)
    wall = time.perf_counter() - start
    return ReportRow(
        scheme=config.scheme, alpha=alpha, M=M, N=N, r=r_used,
        max_error=err, rate=None, wall_time_s=wall,
    )


def run_sweep(config: SweepConfig) -> ConvergenceReport:
    """Run all cells, attach rates, and write the report if a path is set.

    Cells are independent and run on a thread pool; results are assembled
    in deterministic (alpha-major, level-minor) order.  A failing cell
    produces a marker row and later cells still run.
    """
    cells = [(alpha, M, N) for alpha in config.alphas for (M, N) in config.levels]

    def run_one(cell):
        alpha, M, N = cell
        try:
            return _solve_cell(config, alpha, M, N)
        except SubdiffError as exc:
            return ReportRow(
                scheme=config.scheme, alpha=alpha, M=M, N=N,
                r=config.r_override, max_error=None, rate=None,
                wall_time_s=0.0, message=str(exc),
            )

    if config.workers == 1:
        rows = [run_one(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(run_one, cells))

    by_key = {(row.alpha, row.M, row.N): row for row in rows}
    for row in rows:
        finer = by_key.get((row.alpha, 2 * row.M, 2 * row.N))
        if finer is not None and row.max_error and finer.max_error:
            row.rate = rate(row.max_error, finer.max_error)

    report = ConvergenceReport(rows=rows)
    if config.output_path is not None:
        text = to_csv(report) if config.output_format == "csv" else to_markdown(report)
        Path(config.output_path).write_text(text)
    return report


def _fmt_full(x: Optional[float]) -> str:
    return "" if x is None else format(x, ".17g")


def to_csv(report: ConvergenceReport) -> str:
    """Full-precision CSV; numeric fields round-trip exactly.

    Failed cells carry the literal ``failed`` in the max_error column.
    """
    lines = [CSV_HEADER]
    for row in report.rows:
        err = "failed" if row.max_error is None else _fmt_full(row.max_error)
        lines.append(
            f"{row.scheme},{_fmt_full(row.alpha)},{row.M},{row.N},"
            f"{_fmt_full(row.r)},{err},{_fmt_full(row.rate)},{row.wall_time_s:.6f}"
        )
    return "\n".join(lines) + "\n"


def read_report_csv(path: str) -> list[dict]:
    """Parse a report CSV back into dicts (floats where applicable)."""
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != CSV_HEADER:
        raise InvalidArgumentError(f"unexpected CSV header: {lines[0]!r}")
    keys = CSV_HEADER.split(",")
    out = []
    for line in lines[1:]:
        vals = line.split(",")
        rec = dict(zip(keys, vals))
        for key in ("alpha", "r", "max_error", "rate", "wall_time_s"):
            if rec[key] not in ("", "failed"):
                rec[key] = float(rec[key])
            elif rec[key] == "":
                rec[key] = None
        rec["M"] = int(rec["M"])
        rec["N"] = int(rec["N"])
        out.append(rec)
    return out


def to_markdown(report: ConvergenceReport) -> str:
    """Error/rate table per scheme and alpha, 5 significant digits."""
    lines = []
    schemes = sorted({row.scheme for row in report.rows})
    for scheme in schemes:
        rows = [r for r in report.rows if r.scheme == scheme]
        levels = sorted({(r.M, r.N) for r in rows})
        header = "| alpha | " + " | ".join(f"M=N={m}" if m == n else f"M={m},N={n}"
                                           for m, n in levels) + " |"
        sep = "|" + "---|" * (len(levels) + 1)
        lines += [f"### scheme: {scheme}", "", header, sep]
        for alpha in sorted({r.alpha for r in rows}):
            sub = {(r.M, r.N): r for r in rows if r.alpha == alpha}
            errs, rates = [], []
            for lv in levels:
                row = sub.get(lv)
                if row is None:
                    errs.append("")
                    rates.append("")
                    continue
                errs.append("failed" if row.max_error is None else f"{row.max_error:.4e}")
                rates.append("-" if row.rate is None else f"{row.rate:.3f}")
            lines.append(f"| {alpha:g} | " + " | ".join(errs) + " |")
            lines.append("| rate | " + " | ".join(rates) + " |")
        lines.append("")
    return "\n".join(lines) + "\n"


def report_without_walltime(report: ConvergenceReport) -> list[tuple]:
    """Determinism view: every field except the wall-time column."""
    return [
        (r.scheme, r.alpha, r.M, r.N, r.r, r.max_error, r.rate, r.message)
        for r in report.rows
    ]
