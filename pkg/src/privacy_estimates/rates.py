"""Confusion tallies, Beta posteriors for error rates, and binomial intervals."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import DegenerateInputError, DomainError
from .numeric import inverse_regularized_incomplete_beta, regularized_incomplete_beta


@dataclass(frozen=True)
class OutcomeRecord:
    model_id: int
    trial_id: int
    b: int
    b_hat: int

    def __post_init__(self):
        if self.b not in (0, 1) or self.b_hat not in (0, 1):
            raise DomainError("b and b_hat must be bits")
        if self.model_id < 0 or self.trial_id < 0:
            raise DomainError("model_id and trial_id must be nonnegative")


@dataclass(frozen=True)
class ConfusionTally:
    """Counts of attack outcomes; "positive" means the challenge was a member."""

    tp: int
    fn: int
    fp: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fn", "fp", "tn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.positives + self.negatives

    def guess_flipped(self) -> "ConfusionTally":
        """Tally of the adversary that always answers the opposite."""
        return ConfusionTally(tp=self.fn, fn=self.tp, fp=self.tn, tn=self.fp)

    def class_swapped(self) -> "ConfusionTally":
        """Tally with the roles of members and non-members exchanged."""
        return ConfusionTally(tp=self.tn, fn=self.fp, fp=self.fn, tn=self.tp)


@dataclass(frozen=True)
class BetaPosterior:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"Beta parameters must be positive, got ({self.alpha}, {self.beta})")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def std(self) -> float:
        s = self.alpha + self.beta
        return (self.alpha * self.beta / (s * s * (s + 1.0))) ** 0.5

    def cdf(self, x):
        return regularized_incomplete_beta(x, self.alpha, self.beta)

    def quantile(self, p: float) -> float:
        return inverse_regularized_incomplete_beta(p, self.alpha, self.beta)

    def mass(self, lo: float, hi: float) -> float:
        return float(self.cdf(hi) - self.cdf(lo))


JEFFREYS_PRIOR = BetaPosterior(0.5, 0.5)


class Sidedness(str, enum.Enum):
    TWO_SIDED = "two_sided"
    UPPER_ONE_SIDED = "upper_one_sided"
    LOWER_ONE_SIDED = "lower_one_sided"


@dataclass(frozen=True)
class RateInterval:
    lo: float
    hi: float
    per_rate_alpha: float
    sidedness: Sidedness = Sidedness.TWO_SIDED

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise DomainError(f"invalid rate interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, p: float) -> bool:
        return self.lo <= p <= self.hi


def tally_from_outcomes(records: Iterable[OutcomeRecord]) -> ConfusionTally:
    counts = [[0, 0], [0, 0]]
    for r in records:
        counts[r.b][r.b_hat] += 1
    return ConfusionTally(tp=counts[1][1], fn=counts[1][0], fp=counts[0][1], tn=counts[0][0])


def empirical_rates(tally: ConfusionTally) -> tuple[float, float]:
    """Return (FNR, FPR) point estimates."""
    if tally.positives == 0 or tally.negatives == 0:
        raise DegenerateInputError("empirical rates need at least one member and one non-member trial")
    return tally.fn / tally.positives, tally.fp / tally.negatives


def jeffreys_posterior(k: int, n: int, prior: BetaPosterior = JEFFREYS_PRIOR) -> BetaPosterior:
    """Conjugate update of ``prior`` with ``k`` successes in ``n`` trials."""
    _check_counts(k, n, allow_empty=True)
    return BetaPosterior(prior.alpha + k, prior.beta + (n - k))


def _check_counts(k, n, allow_empty=False):
    if int(k) != k or int(n) != n or k < 0 or k > n:
        raise DomainError(f"need integers 0 <= k <= n, got k={k}, n={n}")
    if n < 1 and not allow_empty:
        raise DomainError("need at least one trial")


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def _tail_levels(alpha: float, sidedness: Sidedness) -> tuple[float | None, float | None]:
    # probability levels for the lower and upper limits; None means clamped
    sidedness = Sidedness(sidedness)
    if sidedness is Sidedness.TWO_SIDED:
        return alpha / 2.0, 1.0 - alpha / 2.0
    if sidedness is Sidedness.UPPER_ONE_SIDED:
        return None, 1.0 - alpha
    return alpha, None


def clopper_pearson_interval(
    k: int, n: int, per_rate_alpha: float, sidedness: Sidedness = Sidedness.TWO_SIDED
) -> RateInterval:
    _check_counts(k, n)
    _check_alpha(per_rate_alpha)
    lo_p, hi_p = _tail_levels(per_rate_alpha, sidedness)
    lo = 0.0 if (lo_p is None or k == 0) else inverse_regularized_incomplete_beta(lo_p, k, n - k + 1)
    hi = 1.0 if (hi_p is None or k == n) else inverse_regularized_incomplete_beta(hi_p, k + 1, n - k)
    return RateInterval(lo, hi, per_rate_alpha, Sidedness(sidedness))


def jeffreys_interval(
    k: int,
    n: int,
    per_rate_alpha: float,
    sidedness: Sidedness = Sidedness.TWO_SIDED,
    prior: BetaPosterior = JEFFREYS_PRIOR,
) -> RateInterval:
    _check_counts(k, n)
    _check_alpha(per_rate_alpha)
    post = jeffreys_posterior(k, n, prior)
    lo_p, hi_p = _tail_levels(per_rate_alpha, sidedness)
    lo = 0.0 if (lo_p is None or k == 0) else post.quantile(lo_p)
    hi = 1.0 if (hi_p is None or k == n) else post.quantile(hi_p)
    return RateInterval(lo, hi, per_rate_alpha, Sidedness(sidedness))
