#!/usr/bin/env python3
"""Three-arm operating-characteristics comparison.

Runs the base design, the early-completion arm (predictive retainment
probability), and the isotonic-adjusted arm over the built-in scenarios
and writes one CSV row per (scenario, arm).

Example:
    python scripts/run_comparison.py --grid 3x4 --reps 1000 --out oc.csv
"""

import argparse
import sys

from combodose import (
    CompletionConfig,
    CompletionVariant,
    DesignArm,
    DesignKind,
    DesignParams,
    SimConfig,
    simulate,
)
from combodose.scenarios import builtin_scenarios
from combodose.simulate import metrics_to_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--design", choices=["boin", "keyboard"], default="boin")
    parser.add_argument("--phi", type=float, default=0.3)
    parser.add_argument("--grid", choices=["3x4", "5x6"], default="3x4")
    parser.add_argument("--N", type=int, default=None,
                        help="planned sample size (default 45 / 90 by grid)")
    parser.add_argument("--tau", type=float, default=0.4)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = parser.parse_args(argv)

    N = args.N if args.N is not None else {"3x4": 45, "5x6": 90}[args.grid]
    params = DesignParams(kind=DesignKind(args.design), phi=args.phi)
    arms = tuple(
        DesignArm(
            label=label,
            params=params,
            completion=CompletionConfig(variant=variant, tau=args.tau, cohort_size=3),
        )
        for label, variant in (
            (args.design, CompletionVariant.OFF),
            (f"{args.design}-ec", CompletionVariant.DRP),
            (f"{args.design}-eci", CompletionVariant.DRP_I),
        )
    )
    config = SimConfig(
        designs=arms,
        N=N,
        cohort_size=3,
        replications=args.reps,
        base_seed=args.seed,
        workers=args.workers,
    )
    csv_text = metrics_to_csv(simulate(builtin_scenarios(args.grid), config))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)


if __name__ == "__main__":
    main()
