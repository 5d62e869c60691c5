import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from privacy_estimates import (
    DomainError,
    PrivacyParams,
    RatePoint,
    advantage_bound,
    box_max_containing,
    box_min_lower_bound,
    epsilon_lower_bound_point,
    in_region,
    in_region_mask,
    mia_advantage,
    min_epsilon_containing,
    region_band,
)
from privacy_estimates.region import band_kinks, region_band_arrays

unit = st.floats(min_value=0.0, max_value=1.0)
eps_st = st.floats(min_value=0.0, max_value=60.0)
delta_st = st.sampled_from([0.0, 1e-5, 0.01, 0.1, 0.5])
# dyadic coordinates reflect exactly: 1 - (1 - x) == x
dyadic = st.integers(0, 2**30).map(lambda i: i / 2**30)


def inside(x, y, eps, delta):
    return in_region(RatePoint(x, y), PrivacyParams(eps, delta))


def test_region_examples():
    for eps in (0.0, 1.0, 40.0, math.inf):
        for delta in (0.0, 0.3):
            assert inside(1.0, 0.0, eps, delta)
        assert not inside(0.0, 0.0, eps, 0.5)
        assert inside(0.0, 0.0, eps, 1.0)
        assert inside(0.1, 0.05, eps, 1.0)


def test_params_validation():
    with pytest.raises(DomainError):
        PrivacyParams(-1.0, 0.0)
    with pytest.raises(DomainError):
        PrivacyParams(1.0, 1.5)
    with pytest.raises(DomainError):
        RatePoint(1.2, 0.0)


@settings(max_examples=300)
@given(unit, unit, eps_st, eps_st, delta_st)
def test_nesting(x, y, e1, e2, delta):
    lo, hi = sorted((e1, e2))
    if inside(x, y, lo, delta):
        assert inside(x, y, hi, delta)


@settings(max_examples=300)
@given(dyadic, dyadic, eps_st, delta_st)
def test_symmetries(x, y, eps, delta):
    v = inside(x, y, eps, delta)
    assert inside(y, x, eps, delta) == v
    assert inside(1 - x, 1 - y, eps, delta) == v


@pytest.mark.parametrize("eps", [0.1, 1.0, 5.0])
@pytest.mark.parametrize("delta", [0.0, 1e-5, 0.1])
def test_band_agrees_with_membership(eps, delta):
    g = (np.arange(1000) + 0.5) / 1000
    x, y = np.meshgrid(g, g, indexing="ij")
    lo, hi = region_band_arrays(g, eps, delta)
    band = (lo[:, None] <= y) & (y <= hi[:, None])
    member = in_region_mask(x, y, PrivacyParams(eps, delta))
    # disagreement is only allowed within rounding of the boundary
    E = math.exp(eps)
    near = (np.abs(y - lo[:, None]) < 1e-12 * E) | (np.abs(y - hi[:, None]) < 1e-12 * E)
    assert np.all((band == member) | near)


def test_mask_matches_scalar_test():
    rng = np.random.default_rng(3)
    x, y = rng.random(2000), rng.random(2000)
    for eps in (0.0, 0.7, 35.0, math.inf):
        for delta in (0.0, 0.2):
            p = PrivacyParams(eps, delta)
            expect = [in_region(RatePoint(a, b), p) for a, b in zip(x, y)]
            assert list(in_region_mask(x, y, p)) == expect


def test_band_examples():
    p = PrivacyParams(1.3, 0.05)
    assert region_band(0.96, p)[0] == 0.0
    v = (1 - p.delta) / (1 + math.exp(p.epsilon))
    assert region_band(v, p)[0] == pytest.approx(v, abs=1e-15)
    with pytest.raises(DomainError):
        region_band(0.3, PrivacyParams(math.inf, 0.0))


@settings(max_examples=200)
@given(unit, st.floats(0.0, 20.0), delta_st)
def test_band_reflection(x, eps, delta):
    p = PrivacyParams(eps, delta)
    lo_reflected = region_band(1 - x, p)[0]
    assert region_band(x, p)[1] == pytest.approx(1 - lo_reflected, abs=1e-12 * math.exp(eps))


def test_kinks_are_branch_switches():
    eps, delta = 1.0, 0.01
    ks = band_kinks(eps, delta)
    assert all(0 < k < 1 for k in ks) and ks == sorted(ks)
    assert (1 - delta) / (1 + math.e) in ks


def test_point_bound_examples():
    assert epsilon_lower_bound_point(0.5, 0.5, 0.0) == 0.0
    assert epsilon_lower_bound_point(0.4, 0.4, 0.0) == pytest.approx(math.log(1.5), abs=1e-12)
    assert epsilon_lower_bound_point(0.1764, 0.03621, 1e-5) == pytest.approx(3.124, abs=1e-3)
    # 0.1764 is itself rounded; with the unrounded limit the value is 1.736
    assert epsilon_lower_bound_point(0.1764, 0.0, 1e-5) == pytest.approx(1.736, abs=2e-3)
    assert epsilon_lower_bound_point(0.0, 0.0, 1e-5) == math.inf
    assert epsilon_lower_bound_point(0.9, 0.9, 0.0) == pytest.approx(math.log(9), abs=1e-12)


def test_point_bound_grid_scan_oracle():
    # sup of a fine eps grid over which the point stays outside the region
    grid = np.linspace(0, 5, 50001)
    step = grid[1]
    for x, y, delta in [(0.4, 0.4, 0.0), (0.3, 0.05, 1e-5), (0.1, 0.6, 0.02), (0.7, 0.8, 0.0)]:
        outside = [e for e in grid if not inside(x, y, e, delta)]
        sup = max(outside) if outside else 0.0
        assert abs(epsilon_lower_bound_point(x, y, delta) - sup) <= step


@settings(max_examples=200)
@given(st.floats(1e-6, 1.0), st.floats(1e-6, 1.0), delta_st)
def test_point_bound_matches_geometry(x, y, delta):
    e = min_epsilon_containing(x, y, delta)
    assume(math.isfinite(e))
    assert inside(x, y, e + 1e-9, delta)
    if e > 1e-9:
        assert not inside(x, y, e * (1 - 1e-9) - 1e-12, delta)
    if x + y <= 1 and max(x, y) <= 1 - delta:
        assert epsilon_lower_bound_point(x, y, delta) == pytest.approx(e, abs=1e-12)


def test_box_min_uses_zero_edge_convention():
    lo = box_min_lower_bound(0.0455, 0.1764, 0.0, 0.03621, 1e-5)
    assert lo == pytest.approx(1.736, abs=2e-3)
    # a box meeting the diagonal band gives no evidence at all
    assert box_min_lower_bound(0.3, 0.6, 0.3, 0.6, 1e-5) == 0.0


def test_box_max_is_worst_corner():
    hi = box_max_containing(0.1, 0.2, 0.05, 0.1, 0.0)
    corners = [min_epsilon_containing(x, y, 0.0) for x in (0.1, 0.2) for y in (0.05, 0.1)]
    assert hi == max(corners)
    assert box_max_containing(0.0, 0.1, 0.0, 0.1, 1e-5) == math.inf


def test_advantage_examples():
    assert mia_advantage(0.4, 0.4) == pytest.approx(0.2)
    assert mia_advantage(0.0, 0.0) == 1.0
    assert mia_advantage(0.5, 0.5) == 0.0
    assert advantage_bound(PrivacyParams(0.0, 0.0)) == 0.0
    assert advantage_bound(PrivacyParams(math.log(3), 0.0)) == pytest.approx(0.5)
    assert advantage_bound(PrivacyParams(0.0, 1.0)) == 1.0


@pytest.mark.parametrize("eps", [0.0, 0.5, 2.0, 9.0])
@pytest.mark.parametrize("delta", [0.0, 1e-5, 0.2])
def test_vertex_attains_advantage_bound(eps, delta):
    v = (1 - delta) / (1 + math.exp(eps))
    assert mia_advantage(v, v) == pytest.approx(advantage_bound(PrivacyParams(eps, delta)), abs=1e-12)


def test_large_epsilon_is_overflow_safe():
    p = PrivacyParams(600.0, 0.0)
    assert in_region(RatePoint(1e-200, 0.5), p)
    assert not in_region(RatePoint(1e-300, 1e-300), p)
    assert in_region_mask(np.array([1e-200]), np.array([0.5]), p).all()
