import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from sparsekfold.geometry import (
    Ball,
    balls_have_common_point,
    geq,
    intersection_margin,
    leq,
    min_enclosing_ball,
    min_enclosing_ball_of_balls,
    squared_distance,
)
from sparsekfold.oracle import brute_force_meb_radius


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 25.0), ((1, 1), (2, 3), 5.0)],
)
def test_squared_distance(a, b, expected):
    assert squared_distance(a, b) == expected


def test_squared_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        squared_distance((0, 0), (0, 0, 0))


def test_tolerant_comparisons():
    assert leq(1.0, 1.0 + 1e-12)
    assert leq(1.0 + 1e-10, 1.0)
    assert not leq(1.0 + 1e-6, 1.0)
    assert leq(1e-13, 0.0)
    assert leq(5.0, math.inf) and not leq(math.inf, 5.0)
    assert geq(math.inf, math.inf)


def test_meb_examples():
    r = min_enclosing_ball([(0, 0), (2, 0)])
    assert r.center == pytest.approx((1, 0)) and r.radius == pytest.approx(1)
    r = min_enclosing_ball([(0, 0), (2, 0), (1, 1)])
    assert r.center == pytest.approx((1, 0)) and r.radius == pytest.approx(1)
    tri = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    assert min_enclosing_ball(tri).radius == pytest.approx(1 / math.sqrt(3), rel=1e-12)


def test_meb_empty_input():
    with pytest.raises(ValueError):
        min_enclosing_ball([])
    with pytest.raises(ValueError):
        min_enclosing_ball_of_balls([])
    with pytest.raises(ValueError):
        balls_have_common_point([])


def test_meb_deterministic_for_seed(rng):
    X = rng.normal(size=(40, 3)).tolist()
    assert min_enclosing_ball(X, seed=7) == min_enclosing_ball(X, seed=7)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_meb_matches_support_enumeration(rng, d):
    for _ in range(30):
        n = int(rng.integers(1, 16))
        X = rng.normal(size=(n, d))
        res = min_enclosing_ball(X.tolist(), seed=int(rng.integers(1000)))
        assert res.radius == pytest.approx(brute_force_meb_radius(X), rel=1e-7, abs=1e-12)
        assert len(res.support) <= d + 1
        dist = np.linalg.norm(X - np.asarray(res.center), axis=1)
        assert np.all(dist <= res.radius * (1 + 1e-9) + 1e-12)


def test_meb_of_balls_examples():
    r = min_enclosing_ball_of_balls([Ball((0, 0), 1)])
    assert r.center == pytest.approx((0, 0)) and r.radius == pytest.approx(1)
    r = min_enclosing_ball_of_balls([Ball((0, 0), 2), Ball((0, 0), 1)])
    assert r.center == pytest.approx((0, 0)) and r.radius == pytest.approx(2)
    r = min_enclosing_ball_of_balls([Ball((0, 0), 1), Ball((4, 0), 1)])
    assert r.center == pytest.approx((2, 0)) and r.radius == pytest.approx(3)


def test_meb_of_balls_one_dimensional_extremes(rng):
    for _ in range(200):
        m = int(rng.integers(1, 8))
        x = rng.normal(size=m)
        r = rng.random(m)
        res = min_enclosing_ball_of_balls([Ball((a,), b) for a, b in zip(x, r)], seed=3)
        lo, hi = np.min(x - r), np.max(x + r)
        assert res.radius == pytest.approx((hi - lo) / 2, rel=1e-9, abs=1e-12)
        assert res.center[0] == pytest.approx((hi + lo) / 2, rel=1e-9, abs=1e-12)


def test_meb_of_balls_reduces_to_points(rng):
    for d in (2, 3):
        for _ in range(20):
            X = rng.normal(size=(int(rng.integers(1, 12)), d))
            a = min_enclosing_ball_of_balls([Ball(tuple(p), 0.0) for p in X]).radius
            assert a == pytest.approx(min_enclosing_ball(X.tolist()).radius, rel=1e-9, abs=1e-12)


def _enclosing_radius_by_optimization(centers, radii):
    f = lambda c: max(np.linalg.norm(c - x) + r for x, r in zip(centers, radii))
    best = min(
        (minimize(f, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000}).fun
         for x0 in [centers.mean(0), centers[np.argmax(radii)]]),
    )
    return best


def test_meb_of_balls_containment_and_optimality(rng):
    for _ in range(40):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(2, 7))
        C = rng.normal(size=(m, d))
        R = rng.random(m)
        res = min_enclosing_ball_of_balls([Ball(tuple(c), r) for c, r in zip(C, R)], seed=1)
        c = np.asarray(res.center)
        assert np.all(np.linalg.norm(C - c, axis=1) + R <= res.radius * (1 + 1e-9) + 1e-12)
        assert len(res.support) <= d + 2
        assert res.radius <= _enclosing_radius_by_optimization(C, R) * (1 + 1e-6)


def test_common_point_examples():
    assert balls_have_common_point([Ball((0,), 1), Ball((2,), 1)])
    assert not balls_have_common_point([Ball((0,), 1), Ball((3,), 1)])
    side = math.sqrt(3)
    tri = [(0, 0), (side, 0), (side / 2, 1.5)]
    assert balls_have_common_point([Ball(p, 1.0) for p in tri])


def test_common_point_zero_radii():
    assert balls_have_common_point([Ball((1, 2), 0), Ball((1, 2), 0)])
    assert not balls_have_common_point([Ball((1, 2), 0), Ball((1, 3), 0)])


def test_common_point_point_inside_ball():
    assert balls_have_common_point([Ball((0, 0), 1), Ball((0.5, 0), 0)])
    assert not balls_have_common_point([Ball((0, 0), 1), Ball((1.5, 0), 0)])


def test_shrink_and_enclose_equivalence(rng):
    # Both directions: a common point exists iff the shrunk balls fit in a
    # unit ball after scaling by the largest radius.
    for _ in range(300):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 6))
        C = rng.random((m, d)) * 2
        R = rng.random(m) + 0.05
        s = R.max()
        shrunk = [Ball(tuple(c / s), 1 - r / s) for c, r in zip(C, R)]
        fits = min_enclosing_ball_of_balls(shrunk).radius <= 1 + 1e-9
        margin = intersection_margin([Ball(tuple(c), r) for c, r in zip(C, R)])
        if abs(margin) > 1e-6:
            assert fits == (margin > 0)
            assert balls_have_common_point([Ball(tuple(c), r) for c, r in zip(C, R)]) == fits


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=12, unique=True
    )
)
def test_meb_property_contains_all_points(points):
    res = min_enclosing_ball(points)
    for p in points:
        assert math.dist(p, res.center) <= res.radius * (1 + 1e-9) + 1e-9


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 3)), min_size=1, max_size=6
    )
)
def test_meb_of_balls_property_contains_all_balls(data):
    balls = [Ball((x, y), r) for x, y, r in data]
    res = min_enclosing_ball_of_balls(balls)
    for b in balls:
        assert math.dist(b.center, res.center) + b.radius <= res.radius * (1 + 1e-9) + 1e-9
