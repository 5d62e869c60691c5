"""Interval width against the number of attack trials for a fixed accuracy.

Writes a TSV with one row per trial count and one column per method, then
reports the smallest count reaching the target width.
"""

import argparse
import sys

from privacy_estimates.experiments import sample_size_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--accuracy", type=float, default=0.6)
    ap.add_argument("--delta", type=float, default=1e-5)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--target-width", type=float, default=0.3)
    ap.add_argument("--n-max", type=int, default=2000)
    ap.add_argument("--n-step", type=int, default=50)
    ap.add_argument("--output", default="-", help="TSV path, '-' for stdout")
    args = ap.parse_args()

    grid = list(range(args.n_step, args.n_max + 1, args.n_step))
    res = sample_size_sweep(args.accuracy, args.delta, args.alpha, args.target_width, grid)
    methods = list(res.widths)
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    out.write("n\t" + "\t".join(methods) + "\n")
    for n, widths in res.rows():
        out.write(f"{n}\t" + "\t".join(f"{widths[m]:.6g}" for m in methods) + "\n")
    if out is not sys.stdout:
        out.close()
    for m in methods:
        print(f"# {m}: width <= {args.target_width} first at N = {res.minimal_n[m]}", file=sys.stderr)


if __name__ == "__main__":
    main()
