"""Command-line interface for convergence sweeps and the property suite.

Flags mirror a flat key=value config file (``--config``); explicit flags
win over file entries.  Exit codes: 0 success, 1 solver failure, 2 invalid
configuration, 3 property-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import SubdiffError
from .harness import DEFAULT_LEVELS, SweepConfig, run_sweep, to_csv, to_markdown
from .meshes import build_three_piece_mesh, build_power_mesh
from .l1 import optimal_grading
from .problems import custom_problem, example_problem

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_PROPERTY_FAILURE = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subdiff",
        description="Convergence studies for time-fractional reaction-diffusion solvers",
    )
    p.add_argument("--config", help="flat key = value file mirroring the flags")
    p.add_argument("--alpha", help="comma-separated fractional orders (default 0.2,0.4,0.6,0.8)")
    p.add_argument("--levels", help="comma-separated M=N levels (default 64,...,1024)")
    p.add_argument("--scheme", choices=["integral", "l1", "pl1"], help="scheme (default integral)")
    p.add_argument("--r", type=float, help="mesh grading exponent (baselines only; "
                                           "default: the variant's optimal choice)")
    p.add_argument("--T", type=float, help="time horizon (default 1)")
    p.add_argument("--format", dest="fmt", choices=["csv", "md"], help="report format (default csv)")
    p.add_argument("--out", help="report path (default: print to stdout)")
    p.add_argument("--workers", type=int, help="concurrent solve cells (default 1)")
    p.add_argument("--seed", type=int, help="seed for property-suite sampling (default 0)")
    p.add_argument("--dump-mesh", action="store_true", default=None,
                   help="print temporal mesh nodes for each (alpha, level)")
    p.add_argument("--props", action="store_true", default=None,
                   help="run the property suite instead of a sweep")
    p.add_argument("--problem", choices=["example", "custom"],
                   help="built-in manufactured example or the custom sine-mode family")
    custom = p.add_argument_group("custom problem coefficients "
                                  "(u = (amp*E_a(-lam t^a) + t_coef*t^t_power) sin(mode pi x/l))")
    custom.add_argument("--p", type=float, dest="diff_p", help="diffusion coefficient (default 1)")
    custom.add_argument("--c0", type=float, help="constant reaction coefficient (default 0)")
    custom.add_argument("--l", type=float, dest="length", help="domain length (default pi)")
    custom.add_argument("--amp", type=float, help="relaxation-mode amplitude (default 1)")
    custom.add_argument("--mode", type=int, help="sine mode number (default 1)")
    custom.add_argument("--t-coef", type=float, dest="t_coef", help="power-part coefficient (default 1)")
    custom.add_argument("--t-power", type=float, dest="t_power", help="power-part exponent >= 1 (default 3)")
    return p


_FILE_KEYS = {
    "alpha": str, "levels": str, "scheme": str, "r": float, "T": float,
    "format": str, "out": str, "workers": int, "seed": int,
    "dump-mesh": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "props": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "problem": str, "p": float, "c0": float, "l": float, "amp": float,
    "mode": int, "t-coef": float, "t-power": float,
}

_FILE_TO_ATTR = {
    "format": "fmt", "p": "diff_p", "l": "length",
    "dump-mesh": "dump_mesh", "t-coef": "t_coef", "t-power": "t_power",
}


def parse_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SubdiffError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FILE_KEYS:
            raise SubdiffError(f"{path}:{lineno}: unknown key {key!r}")
        values[_FILE_TO_ATTR.get(key, key)] = _FILE_KEYS[key](value)
    return values


def _merged(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        cfg.update(parse_config_file(args.config))
    for attr in ("alpha", "levels", "scheme", "r", "T", "fmt", "out", "workers",
                 "seed", "dump_mesh", "props", "problem", "diff_p", "c0",
                 "length", "amp", "mode", "t_coef", "t_power"):
        val = getattr(args, attr, None)
        if val is not None:
            cfg[attr] = val
    return cfg


def _parse_alphas(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_levels(text: str) -> tuple[tuple[int, int], ...]:
    return tuple((int(tok), int(tok)) for tok in text.split(",") if tok.strip())


def _problem_factory(cfg: dict):
    if cfg.get("problem", "example") == "example":
        return example_problem

    def factory(alpha: float):
        import math

        return custom_problem(
            alpha=alpha,
            p=cfg.get("diff_p", 1.0),
            c0=cfg.get("c0", 0.0),
            l=cfg.get("length", math.pi),
            T=cfg.get("T", 1.0),
            amp=cfg.get("amp", 1.0),
            mode=cfg.get("mode", 1),
            t_coef=cfg.get("t_coef", 1.0),
            t_power=cfg.get("t_power", 3.0),
        )

    return factory


def _dump_meshes(config: SweepConfig) -> None:
    for alpha in config.alphas:
        for _, N in config.levels:
            if config.scheme == "integral":
                mesh = build_three_piece_mesh(alpha, config.T, N)
            else:
                r = config.r_override
                if r is None:
                    r = optimal_grading(alpha, config.scheme)
                mesh = build_power_mesh(config.T, N, r, alpha)
            nodes = " ".join(format(v, ".17g") for v in mesh.nodes)
            print(f"# mesh scheme={config.scheme} alpha={alpha:g} N={N} kind={mesh.kind}")
            print(nodes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merged(args)
    except (SubdiffError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    if cfg.get("props"):
        from .properties import run_property_suite

        report = run_property_suite(seed=cfg.get("seed", 0))
        return EXIT_OK if report.all_passed else EXIT_PROPERTY_FAILURE

    try:
        sweep = SweepConfig(
            alphas=_parse_alphas(cfg.get("alpha", "0.2,0.4,0.6,0.8")),
            levels=_parse_levels(cfg["levels"]) if "levels" in cfg else DEFAULT_LEVELS,
            scheme=cfg.get("scheme", "integral"),
            r_override=cfg.get("r"),
            T=cfg.get("T", 1.0),
            output_format=cfg.get("fmt", "csv"),
            output_path=cfg.get("out"),
            seed=cfg.get("seed", 0),
            workers=cfg.get("workers", 1),
            problem_factory=_problem_factory(cfg),
        )
        # fail fast on unbuildable problems (bad custom coefficients)
        for alpha in sweep.alphas:
            prob, _ = sweep.problem_factory(alpha)
            if abs(prob.T - sweep.T) > 1e-12 * max(1.0, sweep.T):
                raise SubdiffError(
                    f"problem horizon T={prob.T} does not match --T {sweep.T} "
                    "(the built-in example is fixed at T=1)"
                )
    except (SubdiffError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    if cfg.get("dump_mesh"):
        _dump_meshes(sweep)

    try:
        report = run_sweep(sweep)
    except SubdiffError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE

    if sweep.output_path is None:
        text = to_csv(report) if sweep.output_format == "csv" else to_markdown(report)
        sys.stdout.write(text)
    else:
        print(f"wrote {sweep.output_path}")

    if not report.ok:
        for row in report.rows:
            if row.max_error is None:
                print(f"failed cell alpha={row.alpha} M={row.M} N={row.N}: {row.message}",
                      file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
