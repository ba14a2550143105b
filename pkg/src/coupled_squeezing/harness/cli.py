"""Command-line entry point.

    coupled-squeezing evolve --config run.cfg --out out/run
    coupled-squeezing sweep-scaling --config scaling.cfg --out out/scaling --workers 4
    coupled-squeezing husimi --config run.cfg --out out/husimi

Exit codes: 0 success, 2 config error, 3 solver failure, 4 accuracy failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from ..errors import (
    AccuracyError,
    ConfigError,
    InvalidArgumentError,
    NoSolutionError,
    SingularConditionError,
)
from ..observables import husimi_q
from ..spin_algebra import make_spin_space
from .config import load_config
from .output import fmt, write_lines, write_scenario, write_summary, write_sweep
from .scenario import run_scenario, s_density, state_at
from .sweeps import SweepPointError, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_ACCURACY = 0, 2, 3, 4

HUSIMI_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _cmd_evolve(cfg, prefix, workers):
    result = run_scenario(cfg)
    paths = write_scenario(prefix, result)
    print(f"xi2_min = {fmt(result.trace.xi2_min)}  t_min = {fmt(result.trace.t_min)}")
    return paths


def _sweep_command(kind):
    def command(cfg, prefix, workers):
        sweep = run_sweep(kind, cfg, workers=workers)
        paths = write_sweep(prefix, sweep, cfg)
        for row in sweep.rows:
            print(f"x = {fmt(row.x)}  xi2_min = {fmt(row.xi2_min)}  delta_rel = {fmt(row.delta_rel)}")
        if sweep.fit is not None:
            print(f"slope = {fmt(sweep.fit[0])}  r2 = {fmt(sweep.fit[2])}")
        return paths

    return command


def _cmd_husimi(cfg, prefix, workers):
    """Q maps of spin S at fractions of t_min, plus an index with normalisations."""
    result = run_scenario(cfg)
    space = make_spin_space(cfg.n_s)
    index = ["index,t,normalization,path"]
    paths = []
    for k, frac in enumerate(HUSIMI_FRACTIONS):
        t = frac * result.trace.t_min
        rho = s_density(result.setup, state_at(result, t))
        qmap = husimi_q(rho, space)
        path = f"{prefix}_q{k}.csv"
        qmap.to_csv(path)
        paths.append(path)
        index.append(f"{k},{fmt(float(t))},{fmt(qmap.normalization(cfg.n_s))},{path}")
    write_lines(f"{prefix}_husimi_index.csv", index)
    write_summary(f"{prefix}_husimi_summary.txt", [("xi2_min", result.trace.xi2_min), ("t_min", result.trace.t_min)])
    return paths


COMMANDS = {
    "evolve": _cmd_evolve,
    "sweep-scaling": _sweep_command("scaling"),
    "sweep-imperfection": _sweep_command("imperfection"),
    "sweep-delta": _sweep_command("delta"),
    "husimi": _cmd_husimi,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="coupled-squeezing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value scenario file")
        p.add_argument("--out", default=None, help="output prefix (default: output_prefix from the config)")
        p.add_argument("--workers", type=int, default=1, help="process pool size for sweeps")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        prefix = args.out or cfg.output_prefix
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            COMMANDS[args.command](cfg, prefix, args.workers)
    except (ConfigError, InvalidArgumentError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SweepPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _code_for(exc.cause)
    except (NoSolutionError, SingularConditionError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except AccuracyError as exc:
        print(f"accuracy failure: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    return EXIT_OK


def _code_for(exc):
    if isinstance(exc, AccuracyError):
        return EXIT_ACCURACY
    if isinstance(exc, (NoSolutionError, SingularConditionError)):
        return EXIT_SOLVER
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
