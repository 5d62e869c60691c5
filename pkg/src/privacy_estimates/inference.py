"""Posterior distribution of the empirical privacy parameter and interval estimates.

The error rates get independent Beta posteriors. For a given eps the
posterior probability that the rate pair lies inside R(eps, delta) is the
CDF of eps_hat at eps. Slicing the region vertically reduces that double
integral to

    F(eps) = int_0^1 f_X(x) [G(y_hi(x)) - G(y_lo(x))] dx

with X the FNR, G the FPR marginal CDF and [y_lo, y_hi] the region slice.
The integrand is smooth between the slice's branch switches and the places
where the slice edges cross the bulk of the FPR posterior, so those
abscissas are handed to the quadrature as breakpoints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numba import njit

from .errors import DegenerateInputError, DomainError, NumericalError
from .numeric import (
    QuadratureSpec,
    _beta_pdf2,
    _betainc_pair,
    _log_beta,
    _log_front2,
    integrate_pieces,
)
from .rates import (
    JEFFREYS_PRIOR,
    BetaPosterior,
    ConfusionTally,
    RateInterval,
    Sidedness,
    clopper_pearson_interval,
    jeffreys_interval,
    jeffreys_posterior,
)
from .region import band_kinks, box_max_containing, box_min_lower_bound

DEFAULT_EPS_CAP = 50.0
QUANTILE_TOL = 1e-6

_LINEAR, _LEFT_POWER, _RIGHT_POWER = 0, 1, 2
_SD_MULTIPLES = (0.0, 1.0, 2.5, 5.0, 10.0)


@dataclass(frozen=True)
class JointRatePosterior:
    fnr: BetaPosterior
    fpr: BetaPosterior


def joint_posterior(tally: ConfusionTally, prior: BetaPosterior = JEFFREYS_PRIOR) -> JointRatePosterior:
    return JointRatePosterior(
        fnr=jeffreys_posterior(tally.fn, tally.positives, prior),
        fpr=jeffreys_posterior(tally.fp, tally.negatives, prior),
    )


class Method(str, enum.Enum):
    BAYESIAN = "bayesian"
    JEFFREYS_CI = "jeffreys_ci"
    CLOPPER_PEARSON_CI = "clopper_pearson_ci"


@dataclass(frozen=True)
class EpsilonInterval:
    lo: float
    hi: float
    alpha: float
    method: Method

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi):
            raise DomainError(f"invalid epsilon interval [{self.lo}, {self.hi}]")

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


# ---------------------------------------------------------------------------
# integrand kernels
#
# Near the slice's corners the edge 1 - delta - e^eps x is a small difference
# of numbers close to 1, and for large eps the rounding of x alone would make
# it jitter by e^eps ulps. Every affine quantity is therefore evaluated as its
# exact value at the nearer end of the current piece plus a slope times the
# offset from that end; the offset is small and carries no cancellation.

# per-end columns of the table handed to the kernel
_X, _XC, _A, _BN, _DN, _CC = range(6)


def _end_table(x: np.ndarray, xc: np.ndarray, E: float, delta: float) -> np.ndarray:
    """Affine quantities at piece ends, from (x, 1 - x) pairs known accurately."""
    big = x > 0.5
    tab = np.empty((x.size, 6))
    tab[:, _X] = x
    tab[:, _XC] = xc
    tab[:, _A] = 1.0 - delta - E * x  # lower edge, steep branch
    tab[:, _BN] = np.where(big, xc - delta, (1.0 - delta) - x)  # lower edge, shallow branch, times e^eps
    tab[:, _DN] = np.where(big, (1.0 - delta) - xc, x - delta)  # 1 - upper edge, shallow branch, times e^eps
    tab[:, _CC] = 1.0 - delta - E * xc  # 1 - upper edge, steep branch
    return tab


@njit(cache=True)
def _locate(t, p, pc, q, qc, mode, a, b, lb):
    # maps t in [0, 1] onto the piece [p, q]; returns (which end is nearer,
    # offset from that end, x, 1 - x, f_X(x) dx/dt). which = 0 means p.
    if mode == 1:
        # x = q t^(1/a) removes the x^(a-1) singularity at 0
        if t <= 0.5:
            off = q * t ** (1.0 / a)
            which, x, xc = 0, off, 1.0 - off
        else:
            off = -q * math.expm1(math.log(t) / a)
            which, x, xc = 1, q - off, qc + off
        w = math.exp(a * math.log(q) - math.log(a) + (b - 1.0) * math.log(xc) - lb)
        return which, off, x, xc, w
    if mode == 2:
        # 1 - x = (1 - p) (1 - t)^(1/b) removes the (1-x)^(b-1) singularity at 1
        s = 1.0 - t
        if s <= 0.5:
            off = pc * s ** (1.0 / b)
            which, x, xc = 1, 1.0 - off, off
        else:
            off = -pc * math.expm1(math.log(s) / b)
            which, x, xc = 0, p + off, pc - off
        lx = math.log(x) if x > 0.0 else -math.inf
        w = math.exp(b * math.log(pc) - math.log(b) + (a - 1.0) * lx - lb)
        return which, off, x, xc, w
    h = (q - p) if p < 0.5 else (pc - qc)
    if t <= 0.5:
        off = h * t
        x, xc = p + off, pc - off
        return 0, off, x, xc, h * _beta_pdf2(x, xc, a, b)
    off = h * (1.0 - t)
    x, xc = q - off, qc + off
    return 1, off, x, xc, h * _beta_pdf2(x, xc, a, b)


@njit(cache=True)
def _integrand(t, piece, modes, tab, aX, bX, aY, bY, E, delta, want_pdf):
    lbX = _log_beta(aX, bX)
    x_ab = (1.0 - delta) / (1.0 + E)
    out = np.empty(t.size)
    for i in range(t.size):
        k = piece[i]
        lo_row, hi_row = 2 * k, 2 * k + 1
        which, off, x, xc, w = _locate(
            t[i],
            tab[lo_row, _X],
            tab[lo_row, _XC],
            tab[hi_row, _X],
            tab[hi_row, _XC],
            modes[k],
            aX,
            bX,
            lbX,
        )
        if w == 0.0:
            out[i] = 0.0
            continue
        row = lo_row + which
        sg = 1.0 if which == 0 else -1.0  # x = end + sg * off
        A = tab[row, _A] - sg * E * off
        Bn = tab[row, _BN] - sg * off
        Dn = tab[row, _DN] + sg * off
        Cc = tab[row, _CC] + sg * E * off
        B = Bn / E
        Dc = Dn / E
        if want_pdf:
            # f_Y at each slice edge times the speed of that edge in eps
            v = 0.0
            if x < x_ab:
                if A > 0.0 and x > 0.0:
                    v += _beta_pdf2(A, delta + E * x, aY, bY) * E * x
            elif Bn > 0.0:
                # f_Y(y) * y at y = B
                v += math.exp(_log_front2(B, 1.0 - B, aY, bY) - math.log1p(-B))
            if Dn > 0.0:
                if xc > x_ab:
                    # f_Y(y) * (1 - y) at y = 1 - Dc
                    v += math.exp(_log_front2(1.0 - Dc, Dc, aY, bY) - math.log1p(-Dc))
                elif Cc > 0.0 and xc > 0.0:
                    v += _beta_pdf2(delta + E * xc, Cc, aY, bY) * E * xc
            out[i] = w * v
        else:
            if A >= B and A > 0.0:
                lo, loc = A, delta + E * x
            elif B > 0.0:
                lo, loc = B, 1.0 - B
            else:
                lo, loc = 0.0, 1.0
            # upper edge through its complement
            if Cc >= Dc and Cc > 0.0:
                hi, hic = delta + E * xc, Cc
            elif Dc > 0.0:
                hi, hic = 1.0 - Dc, Dc
            else:
                hi, hic = 1.0, 0.0
            if hi <= lo:
                out[i] = 0.0
                continue
            G_lo, Gc_lo = _betainc_pair(lo, loc, aY, bY)
            G_hi, Gc_hi = _betainc_pair(hi, hic, aY, bY)
            v = (Gc_lo - Gc_hi) if G_lo > 0.5 else (G_hi - G_lo)
            out[i] = w * max(v, 0.0)
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonDistribution:
    """Posterior law of eps_hat: an atom at 0 plus a density on (0, inf)."""

    joint: JointRatePosterior
    delta: float
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    eps_cap: float = DEFAULT_EPS_CAP

    def __post_init__(self):
        if not (0.0 <= self.delta <= 1.0):
            raise DomainError(f"delta must lie in [0, 1], got {self.delta}")
        if not (0.0 < self.eps_cap <= 700.0):
            raise DomainError("eps_cap must lie in (0, 700]")

    @cached_property
    def point_mass_at_zero(self) -> float:
        return self.cdf(0.0)

    def _breakpoints(self, E: float) -> tuple[np.ndarray, np.ndarray]:
        """Piece ends as accurate (x, 1 - x) pairs, including 0 and 1."""
        d = self.delta
        X, Y = self.joint.fnr, self.joint.fpr
        pairs = []

        def add(x, xc):
            pairs.append((x, xc) if x <= 0.5 else (1.0 - xc, xc))

        def add_small(u):  # u itself
            add(u, 1.0 - u)

        def add_near_one(u):  # 1 - u
            add(1.0 - u, u)

        k_ab = (1.0 - d) / (1.0 + E)
        for u in (k_ab, (1.0 - d) / E, d):
            add_small(u)
            add_near_one(u)
        xm, xmc = X.alpha / (X.alpha + X.beta), X.beta / (X.alpha + X.beta)
        ym, ymc = Y.alpha / (Y.alpha + Y.beta), Y.beta / (Y.alpha + Y.beta)
        for k in _SD_MULTIPLES:
            for sgn in (-1.0, 1.0):
                add(xm + sgn * k * X.std, xmc - sgn * k * X.std)
                v, vc = ym + sgn * k * Y.std, ymc - sgn * k * Y.std
                # where each linear piece of the slice edges reaches level v
                add_small((vc - d) / E)
                add(1.0 - d - E * v, d + E * v)
                add_near_one((v - d) / E)
                add(d + E * vc, 1.0 - d - E * vc)
        arr = np.asarray(pairs)
        x, xc = arr[:, 0], arr[:, 1]
        keep = (x > 0.0) & (xc > 0.0) & (x < 1.0) & (xc < 1.0)
        x, xc = x[keep], xc[keep]
        # order by x, resolving ties near 1 by the complement
        order = np.lexsort((-xc, x))
        x, xc = x[order], xc[order]
        distinct = np.ones(x.size, dtype=bool)
        distinct[1:] = (np.diff(x) > 0) | (np.diff(xc) < 0)
        x, xc = x[distinct], xc[distinct]
        if x.size == 0:
            x, xc = np.asarray([0.5]), np.asarray([0.5])
        return np.concatenate([[0.0], x, [1.0]]), np.concatenate([[1.0], xc, [0.0]])

    def _integrate(self, eps: float, want_pdf: bool) -> float:
        E = math.exp(eps)
        ends, ends_c = self._breakpoints(E)
        n = ends.size - 1
        modes = np.zeros(n, dtype=np.int64)
        aX, bX = self.joint.fnr.alpha, self.joint.fnr.beta
        if aX < 1.0:
            modes[0] = _LEFT_POWER
        if bX < 1.0:
            modes[-1] = _RIGHT_POWER
        aY, bY = self.joint.fpr.alpha, self.joint.fpr.beta
        d = self.delta
        # rows 2k and 2k + 1 hold the two ends of piece k
        idx = np.column_stack([np.arange(n), np.arange(1, n + 1)]).ravel()
        tab = _end_table(ends[idx], ends_c[idx], E, d)

        def f(t, piece):
            return _integrand(t, piece, modes, tab, aX, bX, aY, bY, E, d, want_pdf)

        # every piece is integrated over t in [0, 1] with an equal share of the
        # error budget; sharing by x-width starves narrow pieces near x = 0,
        # which can carry much of the mass when the FNR posterior piles up there
        tols = np.full(n, self.quadrature.abs_tol / n)
        return integrate_pieces(f, np.zeros(n), np.ones(n), tols, self.quadrature.max_subdivisions)

    def cdf(self, eps: float) -> float:
        if not (eps >= 0):
            raise DomainError(f"epsilon must be nonnegative, got {eps}")
        if math.isinf(eps) or self.delta >= 1.0:
            return 1.0
        if eps > 700.0:
            eps = 700.0
        return min(1.0, max(0.0, self._integrate(float(eps), want_pdf=False)))

    def pdf(self, eps: float) -> float:
        """Density of the continuous part; at 0 the right-hand limit."""
        if not (eps >= 0) or math.isinf(eps):
            raise DomainError(f"pdf needs a finite nonnegative epsilon, got {eps}")
        if self.delta >= 1.0 or eps > 700.0:
            return 0.0
        return max(0.0, self._integrate(float(eps), want_pdf=True))

    def quantile(self, q: float) -> float:
        """inf{eps : cdf(eps) >= q}; +inf when not reached by ``eps_cap``."""
        if not (0.0 < q < 1.0):
            raise DomainError(f"quantile level must lie in (0, 1), got {q}")
        if self.point_mass_at_zero >= q:
            return 0.0
        lo, hi = 0.0, 1.0
        while self.cdf(hi) < q:
            if hi >= self.eps_cap:
                return math.inf
            lo, hi = hi, min(2.0 * hi, self.eps_cap)
        while hi - lo > QUANTILE_TOL:
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) >= q:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def ring_mass(self, eps_lo: float, eps_hi: float) -> float:
        """Posterior mass of R(eps_hi) minus R(eps_lo)."""
        if not (0.0 <= eps_lo <= eps_hi):
            raise DomainError("ring needs 0 <= eps_lo <= eps_hi")
        if eps_lo == eps_hi:
            return 0.0
        return self.cdf(eps_hi) - self.cdf(eps_lo)


def epsilon_distribution(
    tally: ConfusionTally,
    delta: float,
    prior: BetaPosterior = JEFFREYS_PRIOR,
    quadrature: QuadratureSpec | None = None,
    eps_cap: float = DEFAULT_EPS_CAP,
) -> EpsilonDistribution:
    return EpsilonDistribution(
        joint_posterior(tally, prior), delta, quadrature or QuadratureSpec(), eps_cap
    )


def credible_interval(
    tally: ConfusionTally,
    delta: float,
    alpha: float,
    prior: BetaPosterior = JEFFREYS_PRIOR,
    quadrature: QuadratureSpec | None = None,
    eps_cap: float = DEFAULT_EPS_CAP,
) -> EpsilonInterval:
    """Equal-tailed posterior interval for eps_hat at level 1 - alpha."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    dist = epsilon_distribution(tally, delta, prior, quadrature, eps_cap)
    lo = dist.quantile(alpha / 2.0)
    hi = dist.quantile(1.0 - alpha / 2.0)
    return EpsilonInterval(lo, max(lo, hi), alpha, Method.BAYESIAN)


def rectangle_mass(joint: JointRatePosterior, fnr_interval: RateInterval, fpr_interval: RateInterval) -> float:
    """Posterior probability that both rates fall in their intervals."""
    return joint.fnr.mass(fnr_interval.lo, fnr_interval.hi) * joint.fpr.mass(
        fpr_interval.lo, fpr_interval.hi
    )


class IntervalFamily(str, enum.Enum):
    CLOPPER_PEARSON = "clopper_pearson"
    JEFFREYS = "jeffreys"


def rate_intervals(
    tally: ConfusionTally,
    alpha: float,
    family: IntervalFamily,
    sidedness: Sidedness = Sidedness.TWO_SIDED,
    prior: BetaPosterior = JEFFREYS_PRIOR,
) -> tuple[RateInterval, RateInterval]:
    """FNR and FPR intervals, each at alpha / 2 so that jointly they hold at 1 - alpha."""
    if tally.positives == 0 or tally.negatives == 0:
        raise DegenerateInputError("interval estimates need member and non-member trials")
    per_rate = alpha / 2.0
    family = IntervalFamily(family)
    if family is IntervalFamily.CLOPPER_PEARSON:
        fnr = clopper_pearson_interval(tally.fn, tally.positives, per_rate, sidedness)
        fpr = clopper_pearson_interval(tally.fp, tally.negatives, per_rate, sidedness)
    else:
        fnr = jeffreys_interval(tally.fn, tally.positives, per_rate, sidedness, prior)
        fpr = jeffreys_interval(tally.fp, tally.negatives, per_rate, sidedness, prior)
    return fnr, fpr


def ci_epsilon_interval(
    tally: ConfusionTally,
    delta: float,
    alpha: float,
    family: IntervalFamily,
    sidedness: Sidedness = Sidedness.TWO_SIDED,
    prior: BetaPosterior = JEFFREYS_PRIOR,
) -> EpsilonInterval:
    """Epsilon interval implied by confidence boxes around the two error rates.

    The lower end is the smallest point lower bound over the box, with the
    zero-rate convention of the point bound applied on box edges that touch
    zero. The upper end is the largest eps needed to contain any box corner,
    which is unbounded once the box reaches a zero rate.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    fnr, fpr = rate_intervals(tally, alpha, family, sidedness, prior)
    lo = box_min_lower_bound(fnr.lo, fnr.hi, fpr.lo, fpr.hi, delta)
    hi = box_max_containing(fnr.lo, fnr.hi, fpr.lo, fpr.hi, delta)
    if IntervalFamily(family) is IntervalFamily.CLOPPER_PEARSON:
        method = Method.CLOPPER_PEARSON_CI
    else:
        method = Method.JEFFREYS_CI
    return EpsilonInterval(lo, max(lo, hi), alpha, method)


__all__ = [
    "DEFAULT_EPS_CAP",
    "EpsilonDistribution",
    "EpsilonInterval",
    "IntervalFamily",
    "JointRatePosterior",
    "Method",
    "NumericalError",
    "ci_epsilon_interval",
    "credible_interval",
    "epsilon_distribution",
    "joint_posterior",
    "rate_intervals",
    "rectangle_mass",
]
