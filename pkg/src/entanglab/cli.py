"""Command line: ``entanglab {analyze,run,verify}``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input. Every
error is reported on stderr as one line ``entanglab: error[<kind>]: ...``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hamiltonian as ham
from .io import (
    FormatError,
    atomic_write,
    dumps,
    encode_array,
    read_operator,
    write_summary,
    write_trajectory_csv,
)
from .scenarios.config import load_config
from .scenarios.grid import ConfigurationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entanglab", description="Entanglement generation laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="local split of an operator JSON file")
    a.add_argument("input", help="operator JSON file")
    a.add_argument("--tol", type=_positive_float, default=ham.NON_ENTANGLING_TOL,
                   help="relative tolerance of the non-entangling test (default 1e-9)")

    r = sub.add_parser("run", help="run a scenario config; write CSV and summary JSON")
    r.add_argument("config", help="scenario config (JSON or key = value)")
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--out", default="out", help="output directory (default ./out)")
    r.add_argument("--threads", type=_positive_int, default=1)

    v = sub.add_parser("verify", help="run invariant suites and print a pass/fail table")
    v.add_argument("--suite", choices=("theorems", "appendix", "regimes", "all"), default="all")
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--threads", type=_positive_int, default=1)
    v.add_argument("--inject-gauge-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    return p


def cmd_analyze(args) -> int:
    op = read_operator(args.input)
    split = ham.local_split(op)
    d_a, d_b = op.dims
    report = {
        "residual_hs_norm": split.residual_hs_norm,
        "is_non_entangling": ham.is_non_entangling(op, args.tol),
        "h_a": encode_array((d_a, 1), "operator", split.h_a)["data"],
        "h_b": encode_array((1, d_b), "operator", split.h_b)["data"],
    }
    sys.stdout.write(dumps(report, indent=None))
    return EXIT_OK


def cmd_run(args) -> int:
    from .scenarios.runner import run_scenario

    config = load_config(args.config)
    report = run_scenario(config, seed=args.seed)
    out = Path(args.out)
    name = report.scenario
    csv_path = write_trajectory_csv(out / f"{name}_trajectory.csv", report.trajectory)
    summary_path = write_summary(out / f"{name}_summary.json", name, report.parameters,
                                 report.metrics)
    manifest = {"command": "run", "config_path": str(args.config), "seed": args.seed,
                "output_dir": str(args.out), "exit_code": EXIT_OK}
    atomic_write(out / f"{name}_manifest.json", dumps(manifest))
    print(csv_path)
    print(summary_path)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import format_table, run_suites

    old = ham._GAUGE_FAULT
    ham._GAUGE_FAULT = args.inject_gauge_fault
    try:
        results = run_suites([args.suite], seed=args.seed, threads=args.threads)
    finally:
        ham._GAUGE_FAULT = old
    print(format_table(results))
    failed = sum(not c.passed for _, checks in results for c in checks)
    total = sum(len(checks) for _, checks in results)
    print(f"{total - failed}/{total} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "run": cmd_run, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        kind, msg = exc.kind, str(exc)
    except FormatError as exc:
        kind, msg = "input", str(exc)
    except ConfigurationError as exc:
        kind, msg = "config", str(exc)
    except (ValueError, json.JSONDecodeError) as exc:
        kind, msg = "input", str(exc)
    except OSError as exc:
        kind, msg = "io", f"{exc.strerror}: {exc.filename}"
    one_line = " ".join(msg.split())
    print(f"entanglab: error[{kind}]: {one_line}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
