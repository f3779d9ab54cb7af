"""k-distance permutation: greedy ordering of sites by k-th neighbor distance.

For ``k = 1`` this is farthest point sampling. The first ``k`` sites are the
first ``k`` input points; afterwards the next site is the unordered point
whose k-th nearest ordered site is farthest away, ties going to the smallest
input index. ``lambdas[i]`` records that distance (``inf`` for the seeds).
"""
import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from ._validation import check_k, check_point_cloud
from .exceptions import IngestionError
from .index import GridIndex


@dataclass(frozen=True)
class PointCloud:
    """Validated, immutable set of pairwise distinct sites."""

    points: np.ndarray

    def __post_init__(self):
        pts = check_point_cloud(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class KPermutation:
    """Site order plus insertion values.

    ``order[i]`` is the input index of the (i+1)-th site; ``lambdas[i]`` its
    k-distance to the sites before it. Both are read-only arrays.
    """

    order: np.ndarray
    lambdas: np.ndarray
    k: int

    def __post_init__(self):
        order = np.asarray(self.order, dtype=np.intp)
        lambdas = np.asarray(self.lambdas, dtype=float)
        order.setflags(write=False)
        lambdas.setflags(write=False)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "lambdas", lambdas)

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        if not isinstance(other, KPermutation):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.order, other.order)
            and np.array_equal(self.lambdas, other.lambdas)
        )

    __hash__ = None


def _as_cloud(P):
    return P if isinstance(P, PointCloud) else PointCloud(P)


def _distances(X, rows, q):
    # Column-by-column accumulation keeps results bitwise identical no matter
    # how many rows are evaluated at once.
    diff = X[rows] - q
    acc = diff[:, 0] * diff[:, 0]
    for c in range(1, diff.shape[1]):
        acc = acc + diff[:, c] * diff[:, c]
    return np.sqrt(acc)


def k_distance(x, S, k):
    """Distance from ``x`` to its k-th closest element of ``S`` (with multiplicity)."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.size == 0:
        S = S.reshape(0, len(np.atleast_1d(x)))
    k = check_k(k)
    if S.shape[0] < k:
        raise ValueError(f"need at least k={k} points, got {S.shape[0]}")
    x = np.asarray(x, dtype=float).reshape(-1)
    if S.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {x.shape[0]} != {S.shape[1]}")
    d = _distances(S, slice(None), x)
    return float(np.partition(d, k - 1)[k - 1])


def _seed_permutation(P, k):
    P = _as_cloud(P)
    k = check_k(k, P.n)
    return P, k, list(range(k)), [math.inf] * k


def kdp_simple(P, k):
    """Quadratic-time k-distance permutation.

    Every unordered site keeps its ``k`` smallest distances to ordered sites
    (one row of a sorted array); each step scans all rows for the maximum.
    """
    P, k, order, lambdas = _seed_permutation(P, k)
    X, n = P.points, P.n
    if n == k:
        return KPermutation(order, lambdas, k)
    everyone = np.arange(n)
    near = np.sort(np.column_stack([_distances(X, everyone, X[j]) for j in range(k)]), axis=1)
    unordered = np.ones(n, dtype=bool)
    unordered[:k] = False
    for _ in range(k, n):
        kth = near[:, k - 1]
        j = int(np.argmax(np.where(unordered, kth, -np.inf)))
        order.append(j)
        lambdas.append(float(kth[j]))
        unordered[j] = False
        d = _distances(X, everyone, X[j])
        closer = np.nonzero(unordered & (d < kth))[0]
        if closer.size:
            near[closer, k - 1] = d[closer]
            near[closer] = np.sort(near[closer], axis=1)
    return KPermutation(order, lambdas, k)


def kdp_fast(P, k, stats=None):
    """k-distance permutation with a max-heap and range-restricted updates.

    After site ``p`` is ordered with value ``lam``, only unordered sites
    within ``lam`` of ``p`` can get a smaller k-distance, so only the range
    query result is touched. Produces exactly the output of :func:`kdp_simple`.

    Parameters
    ----------
    stats : dict, optional
        Receives ``"updates"`` (neighbor-heap replacements) and ``"reported"``
        (total size of range query results).
    """
    P, k, order, lambdas = _seed_permutation(P, k)
    X, n = P.points, P.n
    if n == k:
        return KPermutation(order, lambdas, k)
    rest = np.arange(k, n)
    seed_d = np.column_stack([_distances(X, rest, X[j]) for j in range(k)]).tolist()
    # Per-site max-heaps (negated) of the k smallest ordered distances.
    near = {}
    kth = {}
    queue = []
    for y, row in zip(rest.tolist(), seed_d):
        h = [-d for d in row]
        heapq.heapify(h)
        near[y] = h
        kth[y] = -h[0]
        queue.append((h[0], y))
    heapq.heapify(queue)
    index = GridIndex(X, rest)
    updates = reported = 0
    for _ in range(k, n):
        while True:
            neg, j = heapq.heappop(queue)
            if j in kth and kth[j] == -neg:
                break
        lam = kth.pop(j)
        del near[j]
        order.append(j)
        lambdas.append(lam)
        found = index.query(X[j], lam)
        index.delete(j)
        found = [y for y in found if y != j]
        reported += len(found)
        if not found:
            continue
        for y, dy in zip(found, _distances(X, found, X[j]).tolist()):
            h = near[y]
            if dy < -h[0]:
                heapq.heapreplace(h, -dy)
                kth[y] = -h[0]
                heapq.heappush(queue, (h[0], y))
                updates += 1
    if stats is not None:
        stats["updates"] = updates
        stats["reported"] = reported
    return KPermutation(order, lambdas, k)


def spread(P):
    """Diameter divided by the smallest pairwise distance."""
    P = _as_cloud(P)
    if P.n < 2:
        raise IngestionError("spread needs at least two points")
    d = pdist(P.points)
    return float(d.max() / d.min())
