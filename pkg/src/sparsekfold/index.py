"""Dynamic approximate spherical range reporting.

:class:`GridIndex` stands in for a quadtreap. It keeps one hashed uniform grid
per power-of-two cell size and builds a level the first time a query needs it.
A query at radius ``r`` scans the cells of side ``2**floor(log2 r)`` around
the query point and reports every stored point closer than ``2r``; this is a
superset of the points within ``r`` and excludes everything at distance
``>= 2r``, which is the only guarantee callers rely on.
"""
import itertools
import math

import numpy as np


class GridIndex:
    """Insert/delete/query over a subset of a fixed point array.

    Parameters
    ----------
    points : array of shape (n, d)
        Coordinates for every id that may ever be stored.
    ids : iterable of int, optional
        Ids present initially.
    """

    def __init__(self, points, ids=()):
        self.points = np.asarray(points, dtype=float)
        self._coords = [tuple(p) for p in self.points.tolist()]
        self._dim = self.points.shape[1]
        self._alive = set(int(i) for i in ids)
        self._levels = {}

    def __len__(self):
        return len(self._alive)

    def __contains__(self, i):
        return i in self._alive

    def _cell(self, i, level):
        h = math.ldexp(1.0, level)
        return tuple(math.floor(c / h) for c in self._coords[i])

    def _grid(self, level):
        grid = self._levels.get(level)
        if grid is None:
            grid = {}
            for i in self._alive:
                grid.setdefault(self._cell(i, level), set()).add(i)
            self._levels[level] = grid
        return grid

    def insert(self, i):
        i = int(i)
        if i in self._alive:
            return
        self._alive.add(i)
        for level, grid in self._levels.items():
            grid.setdefault(self._cell(i, level), set()).add(i)

    def delete(self, i):
        i = int(i)
        if i not in self._alive:
            return
        self._alive.discard(i)
        for level, grid in self._levels.items():
            key = self._cell(i, level)
            bucket = grid[key]
            bucket.discard(i)
            if not bucket:
                del grid[key]

    def query(self, q, r):
        """Ids of stored points within ``r`` of ``q``, possibly plus some closer than ``2r``."""
        q = tuple(float(c) for c in q)
        if not self._alive:
            return []
        if math.isinf(r):
            return sorted(self._alive)
        if r <= 0.0:
            return sorted(i for i in self._alive if self._coords[i] == q)
        level = math.floor(math.log2(r))
        h = math.ldexp(1.0, level)
        lo = [math.floor((c - r) / h) for c in q]
        hi = [math.floor((c + r) / h) for c in q]
        ncells = 1
        for a, b in zip(lo, hi):
            ncells *= b - a + 1
        if ncells > 4 * len(self._alive) + 64:
            candidates = self._alive
        else:
            grid = self._grid(level)
            candidates = []
            for key in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
                bucket = grid.get(key)
                if bucket:
                    candidates.extend(bucket)
        limit = 4.0 * r * r
        out = []
        for i in candidates:
            p = self._coords[i]
            d2 = 0.0
            for a, b in zip(p, q):
                d2 += (a - b) ** 2
            if d2 < limit:
                out.append(i)
        out.sort()
        return out
