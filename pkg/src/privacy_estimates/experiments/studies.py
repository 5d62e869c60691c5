"""Studies built on the estimators: sample-size sweeps, coverage, heuristic fidelity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DomainError
from ..inference import (
    DEFAULT_EPS_CAP,
    EpsilonDistribution,
    EpsilonInterval,
    IntervalFamily,
    ci_epsilon_interval,
    credible_interval,
    epsilon_distribution,
)
from ..numeric import QuadratureSpec
from ..rates import ConfusionTally
from .mechanisms import GaussianMean, Mechanism, RandomizedResponse
from .protocols import AdversarySpec, AttackKind, ExperimentConfig, run_ind_mia, run_mia_m

SWEEP_METHODS = ("bayesian", "jeffreys", "clopper_pearson")


def expected_tally(accuracy: float, n_total: int) -> ConfusionTally:
    """Noise-free tally of an attack with the given balanced accuracy."""
    if not (0.0 < accuracy <= 1.0):
        raise DomainError(f"accuracy must lie in (0, 1], got {accuracy}")
    if int(n_total) != n_total or n_total < 2 or n_total % 2:
        raise DomainError(f"n_total must be a positive even integer, got {n_total}")
    half = int(n_total) // 2
    # round half up; the small slack absorbs representation error in accuracy * half
    correct = min(half, int(math.floor(accuracy * half + 0.5 + 1e-9)))
    return ConfusionTally(tp=correct, fn=half - correct, fp=half - correct, tn=correct)


def interval_for(
    method: str, tally: ConfusionTally, delta: float, alpha: float, **kw
) -> EpsilonInterval:
    if method == "bayesian":
        return credible_interval(tally, delta, alpha, **kw)
    if method == "jeffreys":
        return ci_epsilon_interval(tally, delta, alpha, IntervalFamily.JEFFREYS)
    if method == "clopper_pearson":
        return ci_epsilon_interval(tally, delta, alpha, IntervalFamily.CLOPPER_PEARSON)
    raise DomainError(f"unknown method {method!r}")


@dataclass
class SweepResult:
    n_grid: list[int]
    widths: dict[str, list[float]]
    minimal_n: dict[str, int | None]

    def rows(self):
        for i, n in enumerate(self.n_grid):
            yield n, {m: self.widths[m][i] for m in self.widths}


def sample_size_sweep(
    accuracy: float,
    delta: float,
    alpha: float,
    target_width: float,
    n_grid: Sequence[int],
    methods: Sequence[str] = SWEEP_METHODS,
) -> SweepResult:
    """Interval width against total sample count, and the first N meeting the target."""
    grid = [int(n) for n in n_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("n_grid must be nonempty and strictly ascending")
    widths = {m: [] for m in methods}
    minimal: dict[str, int | None] = {m: None for m in methods}
    for n in grid:
        tally = expected_tally(accuracy, n)
        for m in methods:
            w = interval_for(m, tally, delta, alpha).width
            widths[m].append(w)
            if minimal[m] is None and w <= target_width:
                minimal[m] = n
    return SweepResult(grid, widths, minimal)


@dataclass
class CoverageResult:
    fraction: float
    contained: list[bool]
    intervals: list[EpsilonInterval]
    eps_reference: float
    # "two_sided": eps_reference inside the interval; "lower_bound": lo <= eps_reference
    criterion: str


def _reference_epsilon(mech: Mechanism, adv: AdversarySpec) -> tuple[float, str]:
    if isinstance(mech, RandomizedResponse) and adv.kind is AttackKind.OPTIMAL_RR:
        return mech.eps_true, "two_sided"
    if isinstance(mech, GaussianMean):
        # the calibrated eps only bounds the true privacy loss from above
        return mech.eps, "lower_bound"
    raise DomainError("coverage needs randomized_response with optimal_rr, or gaussian_mean")


def coverage_experiment(
    mech: Mechanism,
    adv: AdversarySpec,
    trials_per_rep: int,
    reps: int,
    delta: float,
    alpha: float,
    seed: int,
    n: int = 10,
) -> CoverageResult:
    """Fraction of replicates whose credible interval is consistent with the known eps."""
    if reps < 1:
        raise DomainError("reps must be at least 1")
    eps_ref, criterion = _reference_epsilon(mech, adv)
    contained, intervals = [], []
    for r in range(reps):
        report = run_ind_mia(mech, adv, trials_per_rep, seed, n=n, rep=r)
        iv = credible_interval(report.tally, delta, alpha)
        ok = iv.lo <= eps_ref and (criterion == "lower_bound" or eps_ref <= iv.hi)
        intervals.append(iv)
        contained.append(bool(ok))
    return CoverageResult(sum(contained) / reps, contained, intervals, eps_ref, criterion)


def cdf_distance(
    first: EpsilonDistribution, second: EpsilonDistribution, grid_points: int = 201
) -> float:
    """Largest CDF gap on a uniform grid reaching past both 0.999 quantiles."""
    ends = [first.quantile(0.999), second.quantile(0.999)]
    top = min(max(ends), min(first.eps_cap, second.eps_cap))
    grid = np.linspace(0.0, top, grid_points)
    return float(max(abs(first.cdf(e) - second.cdf(e)) for e in grid))


def _run_seed(seed: int, m: int, replicate: int) -> int:
    # independent stream per (seed, m, replicate); SeedSequence does the mixing
    return int(np.random.SeedSequence((seed, m, replicate)).generate_state(1, np.uint64)[0])


@dataclass
class FidelityResult:
    n_total: int
    m_values: list[int]
    seeds: list[int]
    # distances[m][i]: sup-CDF distance between the m run and the m=1 run at seeds[i]
    distances: dict[int, list[float]]
    # distance between two independent m=1 runs, the sampling-noise floor
    null_distances: list[float] = field(default_factory=list)

    def mean_distance(self, m: int) -> float:
        return float(np.mean(self.distances[m]))

    @property
    def mean_null_distance(self) -> float:
        return float(np.mean(self.null_distances))


def heuristic_fidelity(
    mech: Mechanism,
    adv: AdversarySpec,
    n_total: int,
    m_values: Sequence[int],
    seeds: Sequence[int],
    delta: float,
    n: int = 10,
    quadrature: QuadratureSpec | None = None,
    eps_cap: float = DEFAULT_EPS_CAP,
) -> FidelityResult:
    """Compare the eps posterior from m samples per model against one sample per model.

    Every run uses n_total samples in total; run (seed, m) gets its own
    stream, so the comparison includes ordinary sampling noise. The same
    noise floor is measured by comparing two independent m=1 runs.
    """
    for m in m_values:
        if m < 1 or n_total % m:
            raise DomainError(f"m={m} must divide n_total={n_total}")

    def posterior(m: int, seed: int, replicate: int) -> EpsilonDistribution:
        cfg = ExperimentConfig(m=m, n_models=n_total // m, n=n, seed=_run_seed(seed, m, replicate))
        tally = run_mia_m(mech, adv, cfg).tally
        return epsilon_distribution(tally, delta, quadrature=quadrature, eps_cap=eps_cap)

    distances: dict[int, list[float]] = {m: [] for m in m_values if m != 1}
    null = []
    for s in seeds:
        base = posterior(1, s, 0)
        null.append(cdf_distance(base, posterior(1, s, 1)))
        for m in distances:
            distances[m].append(cdf_distance(base, posterior(m, s, 0)))
    return FidelityResult(n_total, list(m_values), list(seeds), distances, null)
