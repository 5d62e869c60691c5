"""Empirical coverage of the credible interval on a mechanism with known eps."""

import argparse

from privacy_estimates.experiments import (
    AdversarySpec,
    GaussianMean,
    RandomizedResponse,
    coverage_experiment,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mechanism", choices=("rr", "gaussian-mean"), default="rr")
    ap.add_argument("--eps", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--delta", type=float, default=1e-5)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=2022)
    ap.add_argument("--intervals", action="store_true", help="print every interval")
    args = ap.parse_args()

    if args.mechanism == "rr":
        mech, adv = RandomizedResponse(args.eps), AdversarySpec.optimal_rr()
    else:
        mech, adv = GaussianMean(args.eps, args.delta), AdversarySpec.loss_threshold(50.0)
    res = coverage_experiment(mech, adv, args.trials, args.reps, args.delta, args.alpha, args.seed)
    if args.intervals:
        for r, (iv, hit) in enumerate(zip(res.intervals, res.contained)):
            print(f"{r}\t{iv.lo:.4f}\t{iv.hi:.4f}\t{int(hit)}")
    print(f"reference eps {res.eps_reference:.4f}, criterion {res.criterion}")
    print(f"coverage {res.fraction:.3f} over {len(res.contained)} repetitions (nominal {1 - args.alpha:.2f})")


if __name__ == "__main__":
    main()
