import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsekfold.exceptions import IngestionError
from sparsekfold.kdp import KPermutation, PointCloud, k_distance, kdp_fast, kdp_simple, spread
from sparsekfold.oracle import validate_covering, validate_packing


def definition_order(X, k):
    """Greedy ordering straight from the definition, with exact sorting."""
    n = len(X)
    order = list(range(k))
    lambdas = [math.inf] * k
    rest = list(range(k, n))
    while rest:
        def kd(q):
            return sorted(math.dist(X[q], X[p]) for p in order)[k - 1]

        best = max(rest, key=lambda q: (kd(q), -q))
        lambdas.append(kd(best))
        order.append(best)
        rest.remove(best)
    return order, lambdas


def test_k_distance_examples():
    assert k_distance([5], [[0], [1], [3]], 2) == 4
    assert k_distance([0], [[0], [1], [3]], 3) == 3
    assert k_distance([1], [[0], [1], [3]], 1) == 0


def test_k_distance_too_few_points():
    with pytest.raises(ValueError):
        k_distance([0], [[1]], 2)


@pytest.mark.parametrize("algo", [kdp_simple, kdp_fast])
def test_line_examples(algo):
    p = algo(np.array([[0.0], [10.0], [1.0], [2.0]]), 1)
    assert p.order.tolist() == [0, 1, 3, 2]
    assert p.lambdas.tolist() == [math.inf, 10, 2, 1]
    p = algo(np.array([[0.0], [1.0], [4.0], [5.0]]), 2)
    assert p.order.tolist() == [0, 1, 3, 2]
    assert p.lambdas.tolist() == [math.inf, math.inf, 5, 3]


@pytest.mark.parametrize("algo", [kdp_simple, kdp_fast])
def test_n_equals_k(algo):
    p = algo(np.array([[0.0, 1.0], [2.0, 3.0], [4.0, 0.0]]), 3)
    assert p.order.tolist() == [0, 1, 2]
    assert np.all(np.isinf(p.lambdas))


@pytest.mark.parametrize("algo", [kdp_simple, kdp_fast])
def test_rejects_bad_input(algo):
    with pytest.raises(IngestionError):
        algo(np.array([[0.0], [1.0], [0.0]]), 1)
    with pytest.raises(IngestionError):
        algo(np.array([[0.0], [1.0]]), 3)


def test_against_definition(rng):
    for _ in range(40):
        n = int(rng.integers(1, 30))
        k = int(rng.integers(1, min(n, 4) + 1))
        X = rng.random((n, 2))
        order, lambdas = definition_order(X, k)
        p = kdp_simple(X, k)
        assert p.order.tolist() == order
        assert p.lambdas == pytest.approx(lambdas, rel=1e-15)


def test_fast_equals_simple_uniform_square(rng):
    X = rng.random((200, 2))
    assert kdp_fast(X, 3) == kdp_simple(X, 3)


def test_fast_equals_simple_with_ties():
    X = np.arange(40, dtype=float).reshape(-1, 1)
    assert kdp_fast(X, 2) == kdp_simple(X, 2)
    grid = np.array([[i, j] for i in range(7) for j in range(7)], dtype=float)
    for k in (1, 2, 3):
        assert kdp_fast(grid, k) == kdp_simple(grid, k)


def test_fast_reports_stats(rng):
    stats = {}
    kdp_fast(rng.random((100, 2)), 2, stats=stats)
    assert stats["updates"] > 0 and stats["reported"] >= stats["updates"]


def test_lambdas_non_increasing(rng):
    for k in (1, 2, 4):
        lam = kdp_fast(rng.random((80, 3)), k).lambdas
        assert np.all(np.diff(lam[k:]) <= 0)


def test_packing_and_covering_hold(rng):
    for k in (1, 2, 3):
        X = rng.random((30, 2))
        perm = kdp_fast(X, k)
        assert validate_packing(X, perm).ok
        assert validate_covering(X, perm, trials=300, seed=k).ok


def test_spread():
    assert spread(np.array([[0.0], [1.0]])) == 1
    assert spread(np.array([[0.0], [1.0], [10.0]])) == 10
    assert spread(np.array([[0.0], [1.0], [2.0], [3.0]])) == 3
    with pytest.raises(IngestionError):
        spread(np.array([[0.0]]))


def test_point_cloud_is_read_only():
    P = PointCloud([[0, 0], [1, 1]])
    with pytest.raises(ValueError):
        P.points[0, 0] = 5
    assert P.n == 2 and P.dim == 2


def test_permutation_equality():
    a = KPermutation([0, 1], [math.inf, 1.0], 1)
    assert a == KPermutation([0, 1], [math.inf, 1.0], 1)
    assert a != KPermutation([0, 1], [math.inf, 2.0], 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 3), st.integers(5, 80), st.integers(0, 2**31 - 1))
def test_fast_equals_simple_property(k, d, n, seed):
    X = np.random.default_rng(seed).random((n, d))
    k = min(k, n)
    assert kdp_fast(X, k) == kdp_simple(X, k)
