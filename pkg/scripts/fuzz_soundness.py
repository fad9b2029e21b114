#!/usr/bin/env python3
"""Differential fuzzing: generate random base-tier programs, enumerate
their concrete executions, and verify every observed alias was predicted
by the analysis.

Usage:
    python3 scripts/fuzz_soundness.py [--trials N] [--seed S] [--unroll K]

Exits 1 if any trial produced a containment or modified-variable
violation; cut-assumption reports are counted but are not failures.
"""

import argparse
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from aliascalc.lang import pretty
from aliascalc.oracle import ExecBounds, check_soundness
from aliascalc.randprog import random_program


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--unroll", type=int, default=4)
    ap.add_argument("--max-instructions", type=int, default=12)
    ap.add_argument("--max-vars", type=int, default=6)
    ap.add_argument(
        "--verbose", action="store_true", help="print every generated program"
    )
    args = ap.parse_args()

    rng = random.Random(args.seed)
    bounds = ExecBounds(loop_unroll=args.unroll)
    failures = 0
    cut_reports = 0
    paths = 0

    for trial in range(args.trials):
        prog = random_program(
            rng,
            max_instructions=args.max_instructions,
            max_vars=args.max_vars,
        )
        rep = check_soundness(prog, bounds)
        paths += rep.paths
        cut_reports += len(rep.cut_violations)
        if args.verbose:
            print(f"-- trial {trial}")
            print(pretty(prog))
        if rep.containment_violations or rep.modvar_violations:
            failures += 1
            print(f"-- trial {trial} FAILED")
            print(pretty(prog))
            print(rep.render())

    print(
        f"{args.trials} trials, {paths} concrete paths, "
        f"{failures} failing trials, {cut_reports} cut-assumption reports"
    )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
