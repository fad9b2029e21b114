#!/usr/bin/env python3
"""Run the analysis over every bundled example program and print the
resulting alias relations in canonical form.

Usage:
    python3 scripts/run_examples.py [--programs DIR] [--trace]
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from aliascalc.engine import analyze
from aliascalc.lang import parse
from aliascalc.relations import parse_relation_literal, render_relation

# (file, language level, initial relation)
EXAMPLES = [
    ("assign_chain.e0", "e0", "{b,c},{f,g,x},{y,z}"),
    ("branch_assign.e0", "e0", "{b,c},{f,g}"),
    ("swap_repeat.e0", "e0", "{c,y},{d,z}"),
    ("swap_loop.e0", "e0", "{c,y},{d,z}"),
    ("mixed_flow.e0", "e0", "{}"),
    ("self_recursive.e1", "e1", "{}"),
    ("self_recursive_rev.e1", "e1", "{}"),
    ("mutual_recursion.e1", "e1", "{}"),
    ("mutual_recursion_large.e1", "e1", "{}"),
    ("field_sources.e2", "e2", "{}"),
    ("qualified_call_args.e2", "e2", "{}"),
    ("linked_lists.e2", "e2", "{}"),
    ("linked_lists_shared.e2", "e2", "{}"),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--programs",
        default=os.path.join(os.path.dirname(__file__), "..", "programs"),
        help="directory holding the example programs",
    )
    ap.add_argument(
        "--trace",
        action="store_true",
        help="also print the per-instruction trace for each example",
    )
    args = ap.parse_args()

    for name, level, init_text in EXAMPLES:
        path = os.path.join(args.programs, name)
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
        init = parse_relation_literal(init_text)
        result = analyze(parse(text, level=level), init, trace=args.trace)
        print(f"== {name}  (level {level}, init {init_text})")
        if args.trace:
            for point in result.trace:
                print(f"   {point.label}  =>  {render_relation(point.relation)}")
        print(f"   {render_relation(result.relation)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
