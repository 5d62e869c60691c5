"""Geometry of the (epsilon, delta) privacy region in the (FNR, FPR) square.

A rate pair (x, y) is achievable against an (eps, delta)-DP mechanism iff

    e^eps * y       >= 1 - delta - x
    e^eps * x       >= 1 - delta - y
    e^eps * (1 - x) >= y - delta
    e^eps * (1 - y) >= x - delta

Every constraint has the shape ``e^eps * B >= R`` with B >= 0, which is how
it is evaluated below (in log space when eps is large).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_LOG_SPACE_ABOVE = 30.0


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        if not (self.epsilon >= 0):
            raise DomainError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not (0.0 <= self.delta <= 1.0):
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")


@dataclass(frozen=True)
class RatePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise DomainError(f"rate point ({self.x}, {self.y}) outside the unit square")


def _constraints(x, y, delta):
    # (B, R) pairs of e^eps * B >= R
    return (
        (y, 1.0 - delta - x),
        (x, 1.0 - delta - y),
        (1.0 - x, y - delta),
        (1.0 - y, x - delta),
    )


def _holds(eps, B, R):
    if R <= 0.0:
        return True
    if B <= 0.0:
        return False
    if math.isinf(eps):
        return True
    if eps > _LOG_SPACE_ABOVE:
        return eps + math.log(B) >= math.log(R)
    return math.exp(eps) * B >= R


def in_region(p: RatePoint, params: PrivacyParams) -> bool:
    return all(_holds(params.epsilon, B, R) for B, R in _constraints(p.x, p.y, params.delta))


def in_region_mask(x, y, params: PrivacyParams) -> np.ndarray:
    """Vectorised membership test for arrays of rate pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eps = params.epsilon
    ok = np.ones(np.broadcast(x, y).shape, dtype=bool)
    with np.errstate(divide="ignore"):
        for B, R in _constraints(x, y, params.delta):
            if math.isinf(eps):
                holds = (R <= 0) | (B > 0)
            elif eps > _LOG_SPACE_ABOVE:
                logB = np.log(np.where(B > 0, B, 1.0))
                logR = np.log(np.where(R > 0, R, 1.0))
                holds = (R <= 0) | ((B > 0) & (eps + logB >= logR))
            else:
                holds = math.exp(eps) * B >= R
            ok &= holds
    return ok


def region_band(x: float, params: PrivacyParams) -> tuple[float, float]:
    """Vertical slice [y_lo, y_hi] of the region at FNR = x (empty if y_lo > y_hi)."""
    if math.isinf(params.epsilon):
        raise DomainError("region_band needs a finite epsilon")
    lo, hi = region_band_arrays(np.asarray([x], dtype=float), params.epsilon, params.delta)
    return float(lo[0]), float(hi[0])


def region_band_arrays(x: np.ndarray, epsilon: float, delta: float):
    E = math.exp(epsilon)
    y_lo = np.maximum(0.0, np.maximum(1.0 - delta - E * x, (1.0 - delta - x) / E))
    y_hi = np.minimum(1.0, np.minimum(delta + E * (1.0 - x), 1.0 + (delta - x) / E))
    return y_lo, y_hi


def band_kinks(epsilon: float, delta: float) -> list[float]:
    """Abscissas in (0, 1) where either band edge changes formula."""
    E = math.exp(epsilon)
    pts = [
        (1.0 - delta) / (1.0 + E),
        1.0 - (1.0 - delta) / (1.0 + E),
        (1.0 - delta) / E,
        1.0 - (1.0 - delta) / E,
        1.0 - delta,
        delta,
    ]
    return sorted({p for p in pts if 0.0 < p < 1.0})


def _min_epsilon_scalar(x, y, delta):
    best = 0.0
    branches = ((1.0 - delta - y, x), (1.0 - delta - x, y), (x - delta, 1.0 - y), (y - delta, 1.0 - x))
    for num, den in branches:
        if num <= 0.0:
            continue
        if den <= 0.0:
            return math.inf
        v = math.log(num / den)
        if v > best:
            best = v
    return best


def min_epsilon_containing(x: float, y: float, delta: float) -> float:
    """Smallest eps with (x, y) in R(eps, delta); +inf if no finite eps works.

    Points with a zero error rate and the other rate below 1 - delta lie
    outside every region with finite eps, so this returns +inf for them.
    """
    return _min_epsilon_scalar(float(x), float(y), float(delta))


def epsilon_lower_bound_point(fnr: float, fpr: float, delta: float) -> float:
    """Privacy lower bound implied by an attack with the given error rates.

    For positive rates this equals :func:`min_epsilon_containing`. When exactly
    one rate is zero only the branch driven by the other rate r is kept,
    giving log((1 - delta) / r); when both are zero the bound is +inf. Points
    above the anti-diagonal are first mirrored through (1/2, 1/2), which maps
    the region onto itself.
    """
    x, y = float(fnr), float(fpr)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError(f"rates must lie in [0, 1], got ({x}, {y})")
    if x + y > 1.0:
        x, y = 1.0 - x, 1.0 - y
    if delta >= 1.0:
        return 0.0
    if x == 0.0 and y == 0.0:
        return math.inf
    if x == 0.0 or y == 0.0:
        r = max(x, y)
        return max(0.0, math.log((1.0 - delta) / r))
    best = 0.0
    for num, den in ((1.0 - delta - y, x), (1.0 - delta - x, y)):
        if num > 0.0:
            best = max(best, math.log(num / den))
    return best


def box_min_lower_bound(x_lo, x_hi, y_lo, y_hi, delta) -> float:
    """Minimum of :func:`epsilon_lower_bound_point` over a rectangle of rates."""
    if x_lo + y_lo <= 1.0 + delta and x_hi + y_hi >= 1.0 - delta:
        return 0.0
    if x_hi + y_hi < 1.0 - delta:
        cands = [(x_hi, y_hi)]
        if y_lo == 0.0:
            cands.append((x_hi, 0.0))
        if x_lo == 0.0:
            cands.append((0.0, y_hi))
    else:
        cands = [(x_lo, y_lo)]
        if y_hi == 1.0:
            cands.append((x_lo, 1.0))
        if x_hi == 1.0:
            cands.append((1.0, y_lo))
    return min(epsilon_lower_bound_point(x, y, delta) for x, y in cands)


def box_max_containing(x_lo, x_hi, y_lo, y_hi, delta) -> float:
    """Largest :func:`min_epsilon_containing` over a rectangle (attained at a corner)."""
    return max(min_epsilon_containing(x, y, delta) for x in (x_lo, x_hi) for y in (y_lo, y_hi))


def mia_advantage(fnr: float, fpr: float) -> float:
    return (1.0 - fnr) - fpr


def advantage_bound(params: PrivacyParams) -> float:
    """Largest membership advantage any attack can reach under (eps, delta)-DP."""
    if math.isinf(params.epsilon):
        raise DomainError("advantage_bound needs a finite epsilon")
    E = math.exp(params.epsilon)
    if math.isinf(E):
        return 1.0
    return (E - 1.0 + 2.0 * params.delta) / (E + 1.0)
