"""Beta-family special functions and adaptive quadrature.

The scalar kernels are compiled with numba so that the posterior integrals,
which evaluate the incomplete beta function many thousands of times per call,
stay fast. Public wrappers validate arguments and accept scalars or arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numba import njit, vectorize

from .errors import DomainError, NumericalError

_TINY = 1e-300
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_CF_MAX_ITER = 1_000_000
_INV_MAX_ITER = 400


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if not (self.abs_tol > 0):
            raise DomainError("abs_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be at least 1")


# ---------------------------------------------------------------------------
# scalar kernels


@njit(cache=True)
def _stirling_correction(x):
    # lgamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)], valid for x >= 10
    r = 1.0 / x
    r2 = r * r
    return r * (
        1.0 / 12.0
        + r2
        * (
            -1.0 / 360.0
            + r2
            * (
                1.0 / 1260.0
                + r2
                * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 / 156.0)))
            )
        )
    )


@njit(cache=True)
def _log_beta(a, b):
    p = min(a, b)
    q = max(a, b)
    s = p + q
    if p >= 10.0:
        corr = _stirling_correction(p) + _stirling_correction(q) - _stirling_correction(s)
        return (
            -0.5 * math.log(q)
            + _LN_SQRT_2PI
            + corr
            + (p - 0.5) * math.log(p / s)
            + q * math.log1p(-p / s)
        )
    if q >= 10.0:
        corr = _stirling_correction(q) - _stirling_correction(s)
        return math.lgamma(p) + corr + p - p * math.log(s) + (q - 0.5) * math.log1p(-p / s)
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(s)


@njit(cache=True)
def _log1pmx(u):
    # log(1 + u) - u without cancellation for small |u|
    if abs(u) >= 0.25:
        return math.log1p(u) - u
    r = u / (2.0 + u)
    y = r * r
    term = 1.0
    total = 0.0
    k = 3.0
    while True:
        piece = term / k
        total += piece
        if piece < 1e-17 * total:
            break
        term *= y
        k += 2.0
    return r * (2.0 * y * total - u)


@njit(cache=True)
def _log_front2(x, xc, a, b):
    # ln[x^a (1-x)^b / B(a, b)] for 0 < x < 1, given xc = 1 - x computed accurately
    if min(a, b) >= 10.0:
        s = a + b
        p0 = a / s
        q0 = b / s
        # x - p0 from whichever of x, xc is more accurate
        dev = x - p0 if x <= 0.5 else q0 - xc
        u = dev / p0
        v = -dev / q0
        if abs(u) < 0.25:
            ta = a * _log1pmx(u)
        else:
            ta = a * (math.log(x) - math.log(p0) - u)
        if abs(v) < 0.25:
            tb = b * _log1pmx(v)
        else:
            tb = b * (math.log(xc) - math.log(q0) - v)
        corr = _stirling_correction(a) + _stirling_correction(b) - _stirling_correction(s)
        return ta + tb + 0.5 * math.log(a * b / s) - _LN_SQRT_2PI - corr
    return a * math.log(x) + b * math.log(xc) - _log_beta(a, b)


@njit(cache=True)
def _log_front(x, a, b):
    return _log_front2(x, 1.0 - x, a, b)


@njit(cache=True)
def _beta_cf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < 1e-16:
            return h
    return math.nan


@njit(cache=True)
def _betainc_pair(x, xc, a, b):
    # (I_x(a, b), 1 - I_x(a, b)), each accurate in its own tail
    if x <= 0.0:
        return 0.0, 1.0
    if xc <= 0.0:
        return 1.0, 0.0
    front = math.exp(_log_front2(x, xc, a, b))
    if x <= (a + 1.0) / (a + b + 2.0):
        v = front * _beta_cf(a, b, x) / a
        return v, 1.0 - v
    v = front * _beta_cf(b, a, xc) / b
    return 1.0 - v, v


@njit(cache=True)
def _betainc(x, a, b):
    return _betainc_pair(x, 1.0 - x, a, b)[0]


@njit(cache=True)
def _betainc_upper(x, a, b):
    # 1 - I_x(a, b), accurate when the result is tiny
    return _betainc_pair(x, 1.0 - x, a, b)[1]


@njit(cache=True)
def _beta_pdf2(x, xc, a, b):
    if x <= 0.0:
        if a < 1.0:
            return math.inf
        if a == 1.0:
            return math.exp(-_log_beta(a, b))
        return 0.0
    if xc <= 0.0:
        if b < 1.0:
            return math.inf
        if b == 1.0:
            return math.exp(-_log_beta(a, b))
        return 0.0
    return math.exp(_log_front2(x, xc, a, b) - math.log(x) - math.log(xc))


@njit(cache=True)
def _beta_pdf(x, a, b):
    return _beta_pdf2(x, 1.0 - x, a, b)


@njit(cache=True)
def _initial_guess(p, a, b):
    if a >= 1.0 and b >= 1.0:
        pp = p if p < 0.5 else 1.0 - p
        t = math.sqrt(-2.0 * math.log(pp))
        z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t
        if p < 0.5:
            z = -z
        al = (z * z - 3.0) / 6.0
        h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0))
        w = z * math.sqrt(al + h) / h - (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (
            al + 5.0 / 6.0 - 2.0 / (3.0 * h)
        )
        if 2.0 * w > 700.0:
            return 0.0
        return a / (a + b * math.exp(2.0 * w))
    lna = math.log(a / (a + b))
    lnb = math.log(b / (a + b))
    t = math.exp(a * lna) / a
    u = math.exp(b * lnb) / b
    w = t + u
    if p < t / w:
        return math.pow(a * w * p, 1.0 / a)
    return 1.0 - math.pow(b * w * (1.0 - p), 1.0 / b)


@njit(cache=True)
def _betainc_inv(p, a, b):
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    lo = 0.0
    hi = 1.0
    x = _initial_guess(p, a, b)
    if not (x > 0.0 and x < 1.0):
        x = 0.5
    for _ in range(_INV_MAX_ITER):
        # evaluate the residual on the better-conditioned side
        if p <= 0.5:
            f = _betainc(x, a, b) - p
        else:
            f = (1.0 - p) - _betainc_upper(x, a, b)
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        dens = _beta_pdf(x, a, b)
        if dens > 0.0 and math.isfinite(dens):
            xn = x - f / dens
        else:
            xn = -1.0
        if not (xn > lo and xn < hi):
            if lo > 0.0 and hi > 4.0 * lo:
                xn = math.sqrt(lo * hi)
            elif lo == 0.0 and hi < 0.25:
                xn = 0.125 * hi
            else:
                xn = 0.5 * (lo + hi)
        step = abs(xn - x)
        x = xn
        # tolerances are relative to the distance from the nearer end, so
        # roots just below 1 are resolved as finely as roots just above 0
        mid = 0.5 * (lo + hi)
        if step <= 1e-15 * min(x, 1.0 - x) or hi - lo <= 1e-15 * min(hi, 1.0 - lo) or not (lo < mid < hi):
            return x
    return math.nan


# array front ends used by other modules


@vectorize(["float64(float64, float64, float64)"], cache=True)
def betainc_ufunc(x, a, b):
    return _betainc(x, a, b)


@vectorize(["float64(float64, float64, float64)"], cache=True)
def beta_pdf_ufunc(x, a, b):
    return _beta_pdf(x, a, b)


# ---------------------------------------------------------------------------
# validated public API


def _check_shape_params(a, b):
    if not (a > 0 and b > 0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"beta parameters must be positive and finite, got a={a}, b={b}")


def _check_unit(name, values):
    arr = np.asarray(values, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def log_beta(a: float, b: float) -> float:
    """Natural log of the beta function B(a, b)."""
    _check_shape_params(a, b)
    return float(_log_beta(float(a), float(b)))


def regularized_incomplete_beta(x, a: float, b: float):
    """Beta(a, b) CDF at ``x``; ``x`` may be a scalar or an array."""
    _check_shape_params(a, b)
    arr = _check_unit("x", x)
    out = betainc_ufunc(arr, float(a), float(b))
    if np.any(np.isnan(out)):
        raise NumericalError("incomplete beta continued fraction did not converge")
    return float(out) if np.ndim(out) == 0 else out


def beta_pdf(x, a: float, b: float):
    _check_shape_params(a, b)
    arr = _check_unit("x", x)
    out = beta_pdf_ufunc(arr, float(a), float(b))
    return float(out) if np.ndim(out) == 0 else out


def inverse_regularized_incomplete_beta(p: float, a: float, b: float) -> float:
    """Return x with I_x(a, b) = p.

    Newton steps on the forward function, kept inside a shrinking bisection
    bracket so that iterates never leave (0, 1).
    """
    _check_shape_params(a, b)
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p}")
    x = _betainc_inv(p, float(a), float(b))
    if math.isnan(x):
        raise NumericalError(f"beta quantile did not converge for p={p}, a={a}, b={b}")
    return float(x)


# ---------------------------------------------------------------------------
# quadrature

_INITIAL_PIECES = 4
_ROUNDING_FLOOR = 64 * np.finfo(float).eps


def integrate_pieces(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    lefts: Sequence[float],
    rights: Sequence[float],
    tols: Sequence[float],
    max_subdivisions: int,
) -> float:
    """Adaptive Simpson over several independent pieces at once.

    ``f(x, piece)`` is called with arrays of abscissas and the index of the
    piece each abscissa belongs to, so a caller can use a different change of
    variables on every piece. Each piece ``k`` must be integrated to within
    ``tols[k]``; its budget is shared among subintervals in proportion to
    their width. Work proceeds breadth first so every call to ``f`` is
    vectorised over all live subintervals.
    """
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    tols = np.asarray(tols, dtype=float)
    keep = rights > lefts
    if not np.any(keep):
        return 0.0
    piece = np.flatnonzero(keep)
    lefts, rights = lefts[keep], rights[keep]
    density = tols[keep] / (rights - lefts)

    # start each piece on a small uniform grid
    fr = np.linspace(0.0, 1.0, _INITIAL_PIECES + 1)
    grid = lefts[:, None] + (rights - lefts)[:, None] * fr[None, :]
    a = grid[:, :-1].ravel()
    b = grid[:, 1:].ravel()
    pid = np.repeat(piece, _INITIAL_PIECES)
    dens = np.repeat(density, _INITIAL_PIECES)
    # an error below tol / max_subdivisions is negligible however narrow the
    # subinterval: at most max_subdivisions of them are ever accepted, so
    # together they add at most one more tol. This is what lets integrable
    # endpoint singularities terminate.
    negl = np.repeat(tols[keep] / max_subdivisions, _INITIAL_PIECES)
    m = 0.5 * (a + b)
    n = a.size
    vals = f(np.concatenate([a, m, b]), np.concatenate([pid, pid, pid]))
    fa, fm, fb = vals[:n], vals[n : 2 * n], vals[2 * n :]
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    used = n
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        k = a.size
        vals = f(np.concatenate([lm, rm]), np.concatenate([pid, pid]))
        flm, frm = vals[:k], vals[k:]
        half = (b - a) / 12.0
        left = half * (fa + 4.0 * flm + fm)
        right = half * (fm + 4.0 * frm + fb)
        diff = left + right - whole
        if not np.all(np.isfinite(diff)):
            raise NumericalError("integrand produced a non-finite value")
        # the budget of a subinterval cannot usefully go below rounding noise
        tol = np.maximum(dens * (b - a), _ROUNDING_FLOOR * (np.abs(left) + np.abs(right)))
        tol = np.maximum(tol, negl / 15.0)
        done = (np.abs(diff) <= 15.0 * tol) | (m <= a) | (b <= m)
        total += float(np.sum((left + right + diff / 15.0)[done]))
        go = ~done
        if not np.any(go):
            break
        used += int(np.count_nonzero(go))
        if used > max_subdivisions:
            raise NumericalError(
                f"quadrature exceeded {max_subdivisions} subdivisions without meeting tolerance"
            )
        a_, m_, b_ = a[go], m[go], b[go]
        a = np.concatenate([a_, m_])
        b = np.concatenate([m_, b_])
        m = np.concatenate([lm[go], rm[go]])
        fa = np.concatenate([fa[go], fm[go]])
        fb = np.concatenate([fm[go], fb[go]])
        fm = np.concatenate([flm[go], frm[go]])
        whole = np.concatenate([left[go], right[go]])
        pid = np.concatenate([pid[go], pid[go]])
        dens = np.concatenate([dens[go], dens[go]])
        negl = np.concatenate([negl[go], negl[go]])
    return total


def adaptive_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    breakpoints: Sequence[float] = (),
    spec: QuadratureSpec | None = None,
) -> float:
    """Integrate a vectorised ``f`` over [lo, hi].

    The range is cut at every breakpoint and each piece is integrated on its
    own, so kinks at the breakpoints do not slow convergence.
    """
    spec = spec or QuadratureSpec()
    lo, hi = float(lo), float(hi)
    if not (lo <= hi):
        raise DomainError("integration bounds must satisfy lo <= hi")
    if lo == hi:
        return 0.0
    bps = np.asarray(breakpoints, dtype=float)
    if bps.size and np.any((bps < lo) | (bps > hi)):
        raise DomainError("breakpoints must lie inside [lo, hi]")
    edges = np.unique(np.concatenate([[lo, hi], bps]))
    widths = np.diff(edges)
    tols = spec.abs_tol * widths / (hi - lo)

    def g(x, _piece):
        return np.asarray(f(x), dtype=float) * np.ones_like(x)

    return integrate_pieces(g, edges[:-1], edges[1:], tols, spec.max_subdivisions)
