#!/usr/bin/env python3
"""Print the pre-trial reference tables for a design.

Shows the retainment-set table (which DLT totals keep the current dose)
and the early-completion decision table (how many remaining patients
still allow stopping enrollment) for both supported designs.

Example:
    python scripts/print_tables.py --phi 0.3 --N 36
"""

import argparse

from combodose import (
    CompletionConfig,
    CompletionVariant,
    DesignKind,
    DesignParams,
    decision_table,
)
from combodose.completion import completion_table, format_completion_table


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--phi", type=float, default=0.3)
    parser.add_argument("--N", type=int, default=36)
    parser.add_argument("--tau", type=float, default=0.4)
    parser.add_argument("--cohort", type=int, default=3)
    args = parser.parse_args(argv)

    grid = list(range(args.cohort, args.N + 1, args.cohort))
    for kind in DesignKind:
        params = DesignParams(kind=kind, phi=args.phi)
        print(f"== {kind.value} (phi={args.phi}) ==")
        print(f"{'n':>4}  retain")
        for row in decision_table(params, grid):
            members = ",".join(map(str, row.members)) or "-"
            print(f"{row.total_n:>4}  {members}")
        print()
        config = CompletionConfig(
            variant=CompletionVariant.DRP, tau=args.tau, cohort_size=args.cohort
        )
        rows = completion_table(params, args.N, config)
        print(format_completion_table(rows, args.cohort))
        print()


if __name__ == "__main__":
    main()
