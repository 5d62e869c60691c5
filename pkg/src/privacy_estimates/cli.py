"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 invalid input data, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError, DomainError, NumericalError, OutcomeFormatError
from .inference import (
    DEFAULT_EPS_CAP,
    EpsilonInterval,
    IntervalFamily,
    ci_epsilon_interval,
    credible_interval,
    epsilon_distribution,
)
from .io import format_outcomes, read_outcomes
from .rates import BetaPosterior, ConfusionTally, Sidedness, tally_from_outcomes
from .experiments import (
    AdversarySpec,
    ExperimentConfig,
    GaussianMean,
    RandomizedResponse,
    coverage_experiment,
    run_mia_m,
    sample_size_sweep,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

METHODS = ("bayesian", "jeffreys", "clopper-pearson")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _prior(text: str) -> BetaPosterior:
    try:
        a, b = (float(v) for v in text.split(","))
        return BetaPosterior(a, b)
    except (ValueError, DomainError):
        raise argparse.ArgumentTypeError(f"expected two positive numbers 'a,b', got {text!r}")


def _fraction(text: str) -> float:
    v = float(text)
    if not (0.0 < v < 1.0):
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _delta(text: str) -> float:
    v = float(text)
    if not (0.0 <= v <= 1.0):
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return v


def _add_counts(p):
    g = p.add_argument_group("attack outcomes (counts or --input)")
    for name in ("tp", "fn", "fp", "tn"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--input", help="outcome TSV")


def _add_estimator(p, delta_required=True):
    p.add_argument("--delta", type=_delta, required=delta_required, default=None if delta_required else 1e-5)
    p.add_argument("--alpha", type=_fraction, default=0.1)
    p.add_argument("--prior", type=_prior, default=BetaPosterior(0.5, 0.5), help="Beta prior 'a,b'")
    p.add_argument("--eps-cap", type=float, default=DEFAULT_EPS_CAP)


def _add_mechanism(p):
    p.add_argument("--mechanism", choices=("rr", "gaussian-mean"))
    p.add_argument("--eps-true", type=float, help="randomized response epsilon")
    p.add_argument("--eps", type=float, help="gaussian mechanism epsilon")
    p.add_argument("--dimension", type=int, default=16)
    p.add_argument("--clip-norm", type=float, default=1.0)
    p.add_argument("--attack", choices=("optimal", "loss-threshold"))
    p.add_argument("--alpha-pct", type=float, default=50.0)
    p.add_argument("--regime", choices=("average_case", "worst_case"), default="average_case")
    p.add_argument("--n", type=int, default=10, help="base training set size")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="privacy-estimates", description="Empirical privacy estimates from attack outcomes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="interval estimates for epsilon")
    _add_counts(p)
    _add_estimator(p)
    p.add_argument("--method", choices=METHODS + ("all",), default="bayesian")
    p.add_argument("--sidedness", choices=[s.value for s in Sidedness], default="two_sided",
                   help="rate intervals for the confidence-interval methods")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("tally", help="count outcomes in a TSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("curve", help="posterior cdf and pdf of epsilon on a grid")
    _add_counts(p)
    _add_estimator(p)
    p.add_argument("--eps-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--output", default="-")

    p = sub.add_parser("simulate", help="run the m-samples-per-model game")
    _add_mechanism(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--models", type=int)
    p.add_argument("--config", help="flat JSON object of flag values; explicit flags win")
    p.add_argument("--output", default="outcomes.tsv")
    p.add_argument("--method", choices=METHODS, default="bayesian")
    _add_estimator(p, delta_required=False)

    p = sub.add_parser("coverage", help="credible-interval coverage on a known mechanism")
    _add_mechanism(p)
    p.set_defaults(seed=2022)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--reps", type=int, default=200)
    _add_estimator(p, delta_required=False)

    p = sub.add_parser("sweep", help="interval width against sample count")
    p.add_argument("--accuracy", type=float, default=0.6)
    p.add_argument("--target-width", type=float, default=0.3)
    p.add_argument("--n-min", type=int, default=50)
    p.add_argument("--n-max", type=int, default=2000)
    p.add_argument("--n-step", type=int, default=50)
    _add_estimator(p, delta_required=False)
    return parser


# ---------------------------------------------------------------------------


def _tally_from_args(args) -> ConfusionTally:
    counts = [getattr(args, k) for k in ("tp", "fn", "fp", "tn")]
    given = [c is not None for c in counts]
    if args.input is not None:
        if any(given):
            raise UsageError("give either --input or the four counts, not both")
        return tally_from_outcomes(read_outcomes(args.input))
    if not all(given):
        raise UsageError("need --tp, --fn, --fp and --tn, or --input")
    return ConfusionTally(*counts)


def _interval(method: str, tally, args) -> EpsilonInterval:
    if method == "bayesian":
        return credible_interval(tally, args.delta, args.alpha, prior=args.prior, eps_cap=args.eps_cap)
    family = IntervalFamily.CLOPPER_PEARSON if method == "clopper-pearson" else IntervalFamily.JEFFREYS
    sided = getattr(args, "sidedness", "two_sided")
    return ci_epsilon_interval(tally, args.delta, args.alpha, family, Sidedness(sided), args.prior)


def _report(method, iv: EpsilonInterval, tally, args) -> dict:
    return {
        "method": method,
        "alpha": args.alpha,
        "delta": args.delta,
        "interval": {"lo": iv.lo, "hi": None if iv.unbounded else iv.hi, "unbounded": iv.unbounded},
        "tally": {"tp": tally.tp, "fn": tally.fn, "fp": tally.fp, "tn": tally.tn},
        "prior": {"alpha": args.prior.alpha, "beta": args.prior.beta},
    }


def _line(method, iv: EpsilonInterval) -> str:
    hi = "inf" if iv.unbounded else f"{iv.hi:.6g}"
    return f"{method}\t[{iv.lo:.6g}, {hi}]"


def cmd_estimate(args, out) -> int:
    tally = _tally_from_args(args)
    methods = METHODS if args.method == "all" else (args.method,)
    reports = []
    for m in methods:
        reports.append((m, _interval(m, tally, args)))
    if args.json:
        docs = [_report(m, iv, tally, args) for m, iv in reports]
        json.dump(docs if args.method == "all" else docs[0], out)
        out.write("\n")
    else:
        for m, iv in reports:
            out.write(_line(m, iv) + "\n")
    return EXIT_OK


def _rate_text(k, n):
    return "undefined" if n == 0 else f"{k / n:.6g}"


def cmd_tally(args, out) -> int:
    t = tally_from_outcomes(read_outcomes(args.input))
    if args.json:
        fnr = None if t.positives == 0 else t.fn / t.positives
        fpr = None if t.negatives == 0 else t.fp / t.negatives
        json.dump({"tp": t.tp, "fn": t.fn, "fp": t.fp, "tn": t.tn, "fnr": fnr, "fpr": fpr}, out)
        out.write("\n")
    else:
        out.write(f"tp\t{t.tp}\nfn\t{t.fn}\nfp\t{t.fp}\ntn\t{t.tn}\n")
        out.write(f"fnr\t{_rate_text(t.fn, t.positives)}\nfpr\t{_rate_text(t.fp, t.negatives)}\n")
    return EXIT_OK


def cmd_curve(args, out) -> int:
    if not (args.eps_max > 0) or args.steps < 2:
        raise UsageError("need --eps-max > 0 and --steps >= 2")
    tally = _tally_from_args(args)
    dist = epsilon_distribution(tally, args.delta, args.prior, eps_cap=args.eps_cap)
    grid = np.linspace(0.0, args.eps_max, args.steps)
    cdf = np.array([dist.cdf(e) for e in grid])
    # quadrature error may leave ~1e-9 wiggles; the cdf column is kept monotone
    cdf = np.maximum.accumulate(cdf)
    pdf = [dist.pdf(e) for e in grid]
    lines = ["epsilon\tcdf\tpdf"] + [f"{e:.10g}\t{c:.10g}\t{p:.10g}" for e, c, p in zip(grid, cdf, pdf)]
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        out.write(text)
    else:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
    return EXIT_OK


_CONFIG_KEYS = {
    "mechanism", "eps_true", "eps", "dimension", "clip_norm", "attack", "alpha_pct", "regime",
    "n", "seed", "m", "models", "output", "method", "delta", "alpha", "eps_cap",
}


def _apply_config(args) -> None:
    if not args.config:
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read --config: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("--config must hold a flat JSON object")
    defaults = vars(build_parser().parse_args(["simulate"]))
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS or isinstance(value, (dict, list)):
            raise UsageError(f"unsupported config entry {key!r}")
        # a flag left at its default yields to the config file
        if getattr(args, key) == defaults[key]:
            setattr(args, key, value)


def _mechanism_and_attack(args):
    if args.mechanism is None:
        raise UsageError("--mechanism is required")
    if args.mechanism == "rr":
        if args.eps_true is None:
            raise UsageError("rr needs --eps-true")
        mech = RandomizedResponse(float(args.eps_true))
        attack = args.attack or "optimal"
    elif args.mechanism == "gaussian-mean":
        if args.eps is None:
            raise UsageError("gaussian-mean needs --eps")
        mech = GaussianMean(float(args.eps), args.delta, int(args.dimension), float(args.clip_norm))
        attack = args.attack or "loss-threshold"
    else:
        raise UsageError(f"unknown mechanism {args.mechanism!r}")
    if attack == "optimal":
        adv = AdversarySpec.optimal_rr(args.regime)
    else:
        adv = AdversarySpec.loss_threshold(float(args.alpha_pct), args.regime)
    return mech, adv


def cmd_simulate(args, out) -> int:
    _apply_config(args)
    if args.models is None:
        raise UsageError("--models is required")
    mech, adv = _mechanism_and_attack(args)
    cfg = ExperimentConfig(m=int(args.m), n_models=int(args.models), n=int(args.n), seed=int(args.seed))
    report = run_mia_m(mech, adv, cfg)
    with open(args.output, "w", encoding="ascii", newline="") as fh:
        fh.write(format_outcomes(report.records))
    t = report.tally
    out.write(f"records\t{len(report.records)}\n")
    out.write(f"tally\t{t.tp}\t{t.fn}\t{t.fp}\t{t.tn}\n")
    out.write(_line(args.method, _interval(args.method, t, args)) + "\n")
    return EXIT_OK


def cmd_coverage(args, out) -> int:
    mech, adv = _mechanism_and_attack(args)
    res = coverage_experiment(mech, adv, args.trials, args.reps, args.delta, args.alpha, args.seed, n=args.n)
    out.write(f"coverage\t{res.fraction:.6g}\n")
    out.write(f"contained\t{sum(res.contained)}/{len(res.contained)}\n")
    out.write(f"criterion\t{res.criterion}\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    if args.n_step < 2 or args.n_step % 2 or args.n_min < 2 or args.n_min % 2 or args.n_max < args.n_min:
        raise UsageError("grid bounds and step must be even with n_min <= n_max")
    grid = list(range(args.n_min, args.n_max + 1, args.n_step))
    res = sample_size_sweep(args.accuracy, args.delta, args.alpha, args.target_width, grid)
    methods = list(res.widths)
    out.write("n\t" + "\t".join(methods) + "\n")
    for n, widths in res.rows():
        out.write(f"{n}\t" + "\t".join(f"{widths[m]:.6g}" for m in methods) + "\n")
    for m in methods:
        found = res.minimal_n[m]
        out.write(f"minimal_n\t{m}\t{'none' if found is None else found}\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "estimate":
            code = cmd_estimate(args, out)
        elif args.command == "tally":
            code = cmd_tally(args, out)
        elif args.command == "curve":
            code = cmd_curve(args, out)
        elif args.command == "simulate":
            code = cmd_simulate(args, out)
        elif args.command == "coverage":
            code = cmd_coverage(args, out)
        else:
            code = cmd_sweep(args, out)
    except UsageError as exc:
        print(f"privacy-estimates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutcomeFormatError as exc:
        print(f"privacy-estimates: invalid outcome file: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, DegenerateInputError, OSError) as exc:
        print(f"privacy-estimates: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"privacy-estimates: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return code


if __name__ == "__main__":
    sys.exit(main())
