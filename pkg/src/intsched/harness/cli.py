"""Command line entry point: ``intsched run|gen|mc``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .engines import ALGOS
from .montecarlo import EXPERIMENTS, monte_carlo
from .run import DEFAULT_CADENCE, InvariantViolation, run_trace
from .trace import KINDS, TraceError, generate, read_trace, write_trace


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intsched", description="Interval scheduling engines and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay a trace against one engine")
    run.add_argument("--algo", choices=ALGOS, required=True)
    run.add_argument("--epsilon", type=_fraction, default=Fraction(1, 2))
    run.add_argument("--machines", type=int, default=1)
    run.add_argument("--horizon", type=int, default=1 << 16)
    run.add_argument("--trace", required=True)
    run.add_argument("--oracle-check", nargs="?", type=int, const=DEFAULT_CADENCE, default=None,
                     metavar="K", help=f"compare with the exact optimum every K events (default {DEFAULT_CADENCE})")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--offsets", type=int, default=5)
    run.add_argument("--w-cap", type=_fraction, default=None)
    run.add_argument("--report", help="write the JSON report here instead of stdout")

    gen = sub.add_parser("gen", help="write a generated trace to stdout")
    gen.add_argument("--kind", choices=KINDS, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--horizon", type=int, default=1 << 16)
    gen.add_argument("--machines", type=int, default=1)
    gen.add_argument("--w", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--churn", type=float, default=0.0)

    mc = sub.add_parser("mc", help="Monte-Carlo runs of the random-partition reductions")
    mc.add_argument("--exp", choices=EXPERIMENTS, required=True)
    mc.add_argument("--trials", type=int, default=200)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--machines", type=int, default=2)
    mc.add_argument("--n", type=int, default=400)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            events = read_trace(args.trace)
            report = run_trace(args.algo, events, epsilon=args.epsilon, machines=args.machines,
                               horizon=args.horizon, oracle_check=args.oracle_check, seed=args.seed,
                               offsets=args.offsets, w_cap=args.w_cap)
            text = report.to_json()
            if args.report:
                with open(args.report, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0 if report.violations == 0 and not report.expectation_failures else 1
        if args.command == "gen":
            events = generate(args.kind, args.n, args.horizon, args.machines, args.w, args.seed, args.churn)
            write_trace(events, sys.stdout)
            return 0
        report = monte_carlo(args.exp, args.trials, args.seed, args.machines, args.n)
        out = report.to_dict()
        out.pop("samples")
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0
    except (TraceError, InvariantViolation, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
