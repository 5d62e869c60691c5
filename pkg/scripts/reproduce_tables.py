"""Print all three interval estimates for the fixed attack outcomes."""

import argparse

from privacy_estimates import (
    ConfusionTally,
    IntervalFamily,
    ci_epsilon_interval,
    credible_interval,
)

# (tp, fn, fp, tn) outcome counts
ROWS = {
    "worked example": (65, 35, 25, 75),
    "perfect attack, 1000 + 1000": (1000, 0, 0, 1000),
    "zero false positives": (90, 10, 0, 100),
    "sst2 dp m=1": (2, 511, 0, 487),
    "sst2 no dp m=1": (31, 968, 5, 996),
    "cifar average-case dp m=1": (175, 312, 188, 325),
    "cifar worst-case dp m=1000": (461, 3, 534, 2),
}


def show(lo, hi):
    return f"({lo:.4g}, {'inf' if hi == float('inf') else f'{hi:.4g}'})"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=1e-5)
    ap.add_argument("--alpha", type=float, default=0.1)
    args = ap.parse_args()

    print("row\tbayesian\tjeffreys\tclopper-pearson")
    for name, counts in ROWS.items():
        t = ConfusionTally(*counts)
        b = credible_interval(t, args.delta, args.alpha)
        j = ci_epsilon_interval(t, args.delta, args.alpha, IntervalFamily.JEFFREYS)
        c = ci_epsilon_interval(t, args.delta, args.alpha, IntervalFamily.CLOPPER_PEARSON)
        print(f"{name}\t{show(b.lo, b.hi)}\t{show(j.lo, j.hi)}\t{show(c.lo, c.hi)}")


if __name__ == "__main__":
    main()
