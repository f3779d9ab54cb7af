"""Persistent homology over Z/2 and bottleneck distance on a log scale.

A filtration is any sequence of objects with ``vertices`` (a sorted tuple of
vertex labels) and ``value`` attributes, sorted so that every simplex comes
after its faces and values never decrease.
"""
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching


class PersistenceDiagram:
    """Birth/death pairs per homology dimension; deaths may be ``inf``."""

    def __init__(self, pairs=None):
        self._pairs = {}
        for dim, pts in (pairs or {}).items():
            arr = np.asarray(pts, dtype=float).reshape(-1, 2)
            if np.any(arr[:, 1] < arr[:, 0]):
                raise ValueError("death before birth")
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            self._pairs[int(dim)] = arr[order]

    def __getitem__(self, dim):
        return self._pairs.get(dim, np.empty((0, 2)))

    @property
    def dims(self):
        return sorted(self._pairs)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        dims = set(self.dims) | set(other.dims)
        return all(np.array_equal(self[d], other[d]) for d in dims)

    def __repr__(self):
        sizes = ", ".join(f"H{d}: {len(self[d])}" for d in self.dims)
        return f"PersistenceDiagram({sizes})"

    def betti(self, value):
        """Number of classes alive at ``value`` in each dimension."""
        return {
            d: int(np.sum((self[d][:, 0] <= value) & (self[d][:, 1] > value)))
            for d in self.dims
        }


def _check_order(simplices):
    position = {}
    last = -math.inf
    for j, s in enumerate(simplices):
        v = s.value
        if v < last:
            raise ValueError(f"simplex {j} has value {v} below its predecessor {last}")
        last = v
        verts = tuple(s.vertices)
        if verts in position:
            raise ValueError(f"simplex {verts} appears twice")
        position[verts] = j
    return position


def boundary_columns(simplices):
    """Boundary of each simplex as a Python int bit set over simplex positions."""
    position = _check_order(simplices)
    cols = []
    for j, s in enumerate(simplices):
        verts = tuple(s.vertices)
        col = 0
        if len(verts) > 1:
            for t in range(len(verts)):
                face = verts[:t] + verts[t + 1 :]
                f = position.get(face)
                if f is None or f >= j:
                    raise ValueError(f"face {face} of {verts} is missing or comes later")
                col |= 1 << f
        cols.append(col)
    return cols


def compute_persistence(simplices, max_dim=None):
    """Persistence diagram of a filtration by standard column reduction.

    Parameters
    ----------
    simplices : sequence
        Sorted filtration; see the module docstring.
    max_dim : int, optional
        Highest homology dimension reported; defaults to the top simplex
        dimension. Classes of that dimension only die if higher simplices are
        present in the input.

    Returns
    -------
    PersistenceDiagram
        Pairs with zero persistence are dropped.
    """
    simplices = list(simplices)
    cols = boundary_columns(simplices)
    dims = [len(s.vertices) - 1 for s in simplices]
    if max_dim is None:
        max_dim = max(dims, default=0)
    pivot_of = {}
    killed = set()
    pairs = {d: [] for d in range(max_dim + 1)}
    for j, col in enumerate(cols):
        while col:
            low = col.bit_length() - 1
            other = pivot_of.get(low)
            if other is None:
                break
            col ^= cols[other]
        cols[j] = col
        if col:
            low = col.bit_length() - 1
            pivot_of[low] = j
            killed.add(low)
            d = dims[low]
            birth, death = simplices[low].value, simplices[j].value
            if d <= max_dim and death > birth:
                pairs[d].append((birth, death))
    for j, col in enumerate(cols):
        if not col and j not in killed and dims[j] <= max_dim:
            pairs[dims[j]].append((simplices[j].value, math.inf))
    return PersistenceDiagram(pairs)


def _log_points(D):
    D = np.asarray(D, dtype=float).reshape(-1, 2)
    if np.any(D[:, 0] <= 0.0):
        raise ValueError("log-scale diagrams need strictly positive births")
    return np.log(D)


def _perfect_matching(A, B, t):
    n1, n2 = len(A), len(B)
    size = n1 + n2
    rows, cols = [], []
    if n1 and n2:
        cost = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)
        r, c = np.nonzero(cost <= t)
        rows.extend(r.tolist())
        cols.extend(c.tolist())
    # Points of A may go to the diagonal, diagonal copies of B to B, and
    # diagonal copies to each other freely.
    ha = 0.5 * (A[:, 1] - A[:, 0]) if n1 else np.empty(0)
    hb = 0.5 * (B[:, 1] - B[:, 0]) if n2 else np.empty(0)
    for i in np.nonzero(ha <= t)[0]:
        rows.append(int(i))
        cols.append(n2 + int(i))
    for j in np.nonzero(hb <= t)[0]:
        rows.append(n1 + int(j))
        cols.append(int(j))
    for j in range(n2):
        for i in range(n1):
            rows.append(n1 + j)
            cols.append(n2 + i)
    if size == 0:
        return True
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def _bottleneck_finite(A, B):
    if len(A) == 0 and len(B) == 0:
        return 0.0
    cands = [0.0]
    if len(A):
        cands.extend((0.5 * (A[:, 1] - A[:, 0])).tolist())
    if len(B):
        cands.extend((0.5 * (B[:, 1] - B[:, 0])).tolist())
    if len(A) and len(B):
        cands.extend(np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2).ravel().tolist())
    cands = np.unique(cands)
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(A, B, cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])


def bottleneck(D1, D2):
    """Bottleneck distance between two single-dimension diagrams (arrays of pairs)."""
    D1 = np.asarray(D1, dtype=float).reshape(-1, 2)
    D2 = np.asarray(D2, dtype=float).reshape(-1, 2)
    inf1, inf2 = np.isinf(D1[:, 1]), np.isinf(D2[:, 1])
    if inf1.sum() != inf2.sum():
        return math.inf
    # Essential classes match by sorted birth, which is optimal on a line.
    ess = np.abs(np.sort(D1[inf1, 0]) - np.sort(D2[inf2, 0]))
    worst = float(ess.max()) if ess.size else 0.0
    return max(worst, _bottleneck_finite(D1[~inf1], D2[~inf2]))


def log_bottleneck(D1, D2, dims=None):
    """Bottleneck distance after taking logarithms of births and deaths.

    ``D1`` and ``D2`` are :class:`PersistenceDiagram` objects (the maximum
    over ``dims`` is returned) or arrays of pairs for a single dimension.
    """
    if isinstance(D1, PersistenceDiagram) or isinstance(D2, PersistenceDiagram):
        if dims is None:
            dims = sorted(set(D1.dims) | set(D2.dims))
        return max((log_bottleneck(D1[d], D2[d]) for d in dims), default=0.0)
    with np.errstate(divide="ignore"):
        return bottleneck(_log_points(D1), _log_points(D2))
