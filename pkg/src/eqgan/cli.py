"""Command-line harness.

    eqgan rand2q|vqe-learn|rand-state|ssvqe-solve --spec spec.json --out dir
          [--seed N] [--paper-scale] [--verbose]

The spec file is JSON; omitted keys fall back to desk-scale defaults
(ssvqe-solve always needs a spec naming its Hamiltonian file). Exit code
is 0 on success and 2 on spec validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, RUNNERS, SpecError, resolve_spec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqgan", description="EQ-GAN experiment harness"
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--spec", help="JSON spec file (defaults: desk scale)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="master seed (overrides spec)")
        p.add_argument(
            "--paper-scale",
            action="store_true",
            help="use the published sample counts instead of desk scale",
        )
        p.add_argument("--verbose", action="store_true", help="progress to stderr")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec is None:
            data = {}
        else:
            with open(args.spec) as fh:
                data = json.load(fh)
        spec = resolve_spec(
            data, args.experiment, seed=args.seed, paper_scale=args.paper_scale
        )
    except (SpecError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    RUNNERS[args.experiment](spec, args.out, verbose=args.verbose)
    return 0


if __name__ == "__main__":
    sys.exit(main())
