"""How far the eps posterior moves when m samples share one trained model.

Randomized response has no training-set interaction, so any distance here is
sampling noise; the m=1 vs m=1 column gives the scale of that noise.
"""

import argparse
import math

from privacy_estimates.experiments import AdversarySpec, RandomizedResponse, heuristic_fidelity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps-true", type=float, default=1.0)
    ap.add_argument("--n-total", type=int, default=1000)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 10, 100])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--delta", type=float, default=1e-5)
    args = ap.parse_args()

    m_values = sorted(set(args.m) | {1})
    res = heuristic_fidelity(RandomizedResponse(args.eps_true), AdversarySpec.optimal_rr(),
                             args.n_total, m_values, range(args.seeds), args.delta)
    print("seed\t" + "\t".join(f"m={m}" for m in res.distances) + "\tm=1 again")
    for i, s in enumerate(res.seeds):
        cols = [f"{res.distances[m][i]:.4f}" for m in res.distances]
        print(f"{s}\t" + "\t".join(cols) + f"\t{res.null_distances[i]:.4f}")
    means = [f"{res.mean_distance(m):.4f}" for m in res.distances]
    print("mean\t" + "\t".join(means) + f"\t{res.mean_null_distance:.4f}")
    se = math.sqrt(sum((d - res.mean_null_distance) ** 2 for d in res.null_distances) / len(res.seeds))
    print(f"# spread of the m=1 column: {se:.4f}")


if __name__ == "__main__":
    main()
