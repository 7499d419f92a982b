"""Command line interface.

    pathkin run SCENARIO [--out FILE] [--format csv|table] [--jobs N]
    pathkin verify SCENARIO --suite sr|euclidean|axioms [--tol TOL]

Exit codes: 0 success, 1 invalid input, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import PathkinError
from .runner import format_csv, format_table, header, run_scenario, verify
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pathkin", description="Relative kinematics along paths with a transport.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate the sweep of a scenario")
    run.add_argument("scenario")
    run.add_argument("--out", help="write to this file instead of stdout")
    run.add_argument("--format", choices=("csv", "table"), default="csv")
    run.add_argument("--jobs", type=int, default=1, help="worker threads (output order is unchanged)")

    ver = sub.add_parser("verify", help="check a scenario against the reference oracles")
    ver.add_argument("scenario")
    ver.add_argument("--suite", choices=("sr", "euclidean", "axioms"), required=True)
    ver.add_argument("--tol", type=float, default=None, help="override every tolerance of the suite")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; that code is reserved here
        return EXIT_OK if exc.code == 0 else EXIT_INVALID

    try:
        sc = load_scenario(args.scenario)
        if args.command == "run":
            if args.jobs < 1:
                raise ScenarioError("--jobs", "must be >= 1")
            rows = run_scenario(sc, jobs=args.jobs)
            cols = header(sc)
            text = format_csv(cols, rows) if args.format == "csv" else format_table(cols, rows)
            if args.out:
                with open(args.out, "w", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.tol is not None and not args.tol >= 0.0:
            raise ScenarioError("--tol", "must be a non-negative number")
        report = verify(sc, args.suite, args.tol)
    except (PathkinError, ValueError, OSError) as exc:
        print(f"pathkin: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(report.render())
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
