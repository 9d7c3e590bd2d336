"""Command-line interface.

    minimaxtr run --config cfg.json --out results/ [--seed N] [--parallel K]
    minimaxtr check-problem --config cfg.json
    minimaxtr certify --trajectory results/NAME.csv --config cfg.json
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .harness import certify_run, check_problem, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minimaxtr",
        description="Trust-region solvers for nonconvex-strongly-concave "
                    "minimax problems: benchmark runner and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment batch")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.add_argument("--parallel", type=int, default=1,
                       help="number of concurrent runs")

    p_check = sub.add_parser("check-problem",
                             help="finite-difference and structure checks")
    p_check.add_argument("--config", required=True, help="JSON config file")

    p_cert = sub.add_parser("certify",
                            help="re-validate the certificate of a recorded run")
    p_cert.add_argument("--trajectory", required=True, help="trajectory CSV")
    p_cert.add_argument("--config", required=True, help="JSON config file")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        index = run_experiment(args.config, args.out, seed=args.seed,
                               parallel=args.parallel)
        for run in index["runs"]:
            print(f"{run['name']}: {run['status']} -> {run['trajectory_csv']}")
        failed = [r for r in index["runs"] if r["status"] != "ok"]
        return 1 if failed else 0
    if args.command == "check-problem":
        report = check_problem(args.config)
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0 if report["ok"] else 1
    if args.command == "certify":
        report = certify_run(args.trajectory, args.config)
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0 if report["ok"] else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
