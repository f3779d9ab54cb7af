"""Discrete sparse k-th order Cech filtration.

Sites are addressed by their position in the k-distance permutation (0-based),
so position ``i`` has freezing radius ``crit[i]`` and removal radius
``omega[i]``, both non-increasing in ``i``. A lens is a sorted k-tuple of
positions; a simplex is a sorted tuple of lenses. Critical values live on the
grid ``(1 + eps_prime) ** z`` and are stored by their integer exponent ``z``.

For every position ``i >= k`` the builder enumerates the simplices whose
highest involved site is ``i`` ("associated" to ``i``). All their sites lie
within ``2 * omega[i]`` of site ``i``, so only those predecessors (friends)
are considered. The single lens made of the first ``k`` sites never freezes
and is added in a closing pass.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from ._validation import check_epsilon, check_k, check_max_dim
from .exceptions import ResourceLimitError
from .geometry import Ball, balls_have_common_point, leq, min_enclosing_ball
from .index import GridIndex
from .kdp import KPermutation, PointCloud, kdp_fast

LensId = Tuple[int, ...]

#: Returned by :func:`frozen_radius_at` once a lens has been removed.
EMPTY = None


@dataclass(frozen=True)
class Params:
    k: int
    epsilon: float
    max_dim: int = 1
    seed: int = 0
    eps_prime: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "k", check_k(self.k))
        object.__setattr__(self, "epsilon", check_epsilon(self.epsilon))
        object.__setattr__(self, "max_dim", check_max_dim(self.max_dim))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "eps_prime", self.epsilon / 3.0)


@dataclass(frozen=True)
class SiteSchedule:
    """Per-position insertion value, freezing radius and removal radius.

    Infinite entries (the first ``k`` positions) are only ever compared,
    never multiplied.
    """

    lambdas: Tuple[float, ...]
    eps_prime: float
    crit: Tuple[float, ...] = field(init=False)
    omega: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        ep = float(self.eps_prime)
        if not ep > 0.0:
            raise ValueError(f"eps_prime must be positive, got {ep}")
        lambdas = tuple(float(v) for v in self.lambdas)
        crit = tuple(v if math.isinf(v) else (1.0 + ep) * v / ep for v in lambdas)
        omega = tuple(c if math.isinf(c) else (1.0 + ep) * c for c in crit)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "eps_prime", ep)
        object.__setattr__(self, "crit", crit)
        object.__setattr__(self, "omega", omega)

    @property
    def base(self):
        return 1.0 + self.eps_prime

    def __len__(self):
        return len(self.lambdas)


class FilteredSimplex(NamedTuple):
    vertices: Tuple[LensId, ...]
    z: int
    value: float

    @property
    def dim(self):
        return len(self.vertices) - 1


@dataclass
class SparseFiltration:
    """Sorted simplex list plus provenance.

    ``simplices`` is ordered by (value, dimension, vertices), which is a valid
    filtration order. ``zmin`` is the exponent given to vertices whose lens is
    born at radius zero (only possible for ``k = 1``).
    """

    simplices: list
    params: Params
    permutation: KPermutation
    zmin: Optional[int] = None
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    @property
    def base(self):
        return 1.0 + self.params.eps_prime

    def count_by_dim(self):
        counts = [0] * (self.params.max_dim + 1)
        for s in self.simplices:
            counts[s.dim] += 1
        return counts

    def as_dict(self):
        """Map from simplex vertices to exponent."""
        return {s.vertices: s.z for s in self.simplices}

    def lens_sites(self, lens):
        """Sorted input indices of the sites making up ``lens``."""
        return tuple(sorted(int(self.permutation.order[p]) for p in lens))

    def input_vertices(self, simplex):
        """Vertices of ``simplex`` relabeled by input indices, canonically sorted."""
        return tuple(sorted(self.lens_sites(A) for A in simplex.vertices))


def grid_value(z, eps_prime):
    return (1.0 + eps_prime) ** z


def ceil_exponent(x, base):
    """Smallest integer ``z`` with ``base ** z >= x`` (tolerant); ``-inf`` for ``x == 0``."""
    if x <= 0.0:
        return -math.inf
    if math.isinf(x):
        raise ValueError("cannot discretize an infinite radius")
    z = math.ceil(math.log(x) / math.log(base))
    while leq(x, base ** (z - 1)):
        z -= 1
    while not leq(x, base**z):
        z += 1
    return z


class LensGeometry:
    """Site coordinates in permutation order with a cache of enclosing radii."""

    def __init__(self, sites, seed=0):
        self.sites = [tuple(p) for p in np.asarray(sites, dtype=float).tolist()]
        self.seed = seed
        self._radius = {}

    def __getstate__(self):
        return {"sites": self.sites, "seed": self.seed, "_radius": {}}

    def radius(self, ids):
        key = tuple(sorted(set(ids)))
        r = self._radius.get(key)
        if r is None:
            r = min_enclosing_ball([self.sites[i] for i in key], seed=self.seed).radius
            self._radius[key] = r
        return r

    def distance(self, i, j):
        return math.dist(self.sites[i], self.sites[j])


def lens_freezing_radius(A, sched):
    return min(sched.crit[p] for p in A)


def frozen_radius_at(A, r, sched):
    """Radius of the frozen lens of ``A`` at scale ``r``, or ``EMPTY`` once removed."""
    crit = lens_freezing_radius(A, sched)
    if r < crit:
        return r
    if leq(r, sched.base * crit):
        return crit
    return EMPTY


def friends(i, sched, geom, index=None):
    """Positions before ``i`` within ``2 * omega[i]`` of site ``i``.

    ``index`` must hold exactly the positions ``0 .. i-1``; its approximate
    answer is filtered down to the exact ball. Without an index the
    predecessors are scanned directly.
    """
    reach = 2.0 * sched.omega[i] if not math.isinf(sched.omega[i]) else math.inf
    if math.isinf(reach):
        return list(range(i))
    candidates = index.query(geom.sites[i], reach) if index is not None else range(i)
    out = [j for j in candidates if j < i and geom.distance(i, j) <= reach]
    out.sort()
    return out


def vertex_check(A, cap, sched, geom):
    """Exponent of lens ``A`` if its enclosing radius is at most ``cap``, else None.

    A zero radius (single-site lens) yields ``-inf``; the builder clamps it.
    """
    if len(A) > 1 and not math.isinf(cap):
        # Half the largest pairwise distance is a lower bound on the radius.
        spread = max(geom.distance(a, b) for a, b in itertools.combinations(A, 2))
        if not leq(0.5 * spread, cap):
            return None
    alpha = geom.radius(A)
    if not leq(alpha, cap):
        return None
    return ceil_exponent(alpha, sched.base)


def _balls_at(sigma, r, sched, geom):
    radius = {}
    for A in sigma:
        rho = frozen_radius_at(A, r, sched)
        if rho is EMPTY:
            raise ValueError(f"lens {A} is already removed at radius {r}")
        for p in A:
            old = radius.get(p)
            radius[p] = rho if old is None else min(old, rho)
    return [Ball(geom.sites[p], rho) for p, rho in sorted(radius.items())]


def cones_intersect_at(sigma, r, sched, geom):
    """Whether the frozen lenses of ``sigma`` share a point at scale ``r``."""
    return balls_have_common_point(_balls_at(sigma, r, sched, geom), seed=geom.seed)


def simplex_status(sigma, sched, geom):
    """Critical exponent of ``sigma`` in the discrete filtration, or None if absent.

    With ``rm`` the enclosing radius of all involved sites and ``lam`` the
    smallest freezing radius among the lenses:

    * ``rm <= lam``: nothing is frozen yet, the exponent is the ceiling of ``rm``;
    * ``rm > (1 + eps') lam``: a lens disappears before they can meet;
    * otherwise the lenses must meet at the first removal radius ``w``; the
      exponent is that of ``w`` or the grid step just below it.
    """
    sites = set()
    for A in sigma:
        sites.update(A)
    rm = geom.radius(sites)
    lam = min(lens_freezing_radius(A, sched) for A in sigma)
    base = sched.base
    if leq(rm, lam):
        return ceil_exponent(rm, base)
    w = base * lam
    if not leq(rm, w):
        return None
    if not cones_intersect_at(sigma, w, sched, geom):
        return None
    z = ceil_exponent(w, base)
    if cones_intersect_at(sigma, base ** (z - 1), sched, geom):
        return z - 1
    return z


def gamma_bound(k, epsilon, delta):
    """Packing bound on the number of sites near a given site."""
    return k * (96.0 / epsilon) ** delta


def size_bound(n, k, epsilon, delta, m):
    """Upper bound ``n * gamma ** (k m)`` on simplices made of ``m`` lenses."""
    return n * gamma_bound(k, epsilon, delta) ** (k * m)


def _site_simplices(i, J, sched, geom, k, max_dim, budget=None):
    """Simplices associated to position ``i`` as ``(vertices, z)`` pairs."""
    crit_i, omega_i = sched.crit[i], sched.omega[i]
    out = []
    layer = []
    for rest in itertools.combinations(J, k - 1):
        A = rest + (i,)
        z = vertex_check(A, crit_i, sched, geom)
        if z is not None:
            layer.append(((A,), z))
    out.extend(layer)
    if max_dim == 0 or not layer:
        return out
    pool = []
    for A in itertools.combinations(J + [i], k):
        cap = min(lens_freezing_radius(A, sched), omega_i)
        if vertex_check(A, cap, sched, geom) is not None:
            pool.append(A)
    for _ in range(max_dim):
        seen = set()
        nxt = []
        for tau, _z in layer:
            members = set(tau)
            for A in pool:
                if A in members:
                    continue
                sigma = tuple(sorted(tau + (A,)))
                if sigma in seen:
                    continue
                seen.add(sigma)
                z = simplex_status(sigma, sched, geom)
                if z is not None:
                    nxt.append((sigma, z))
                    if budget is not None and len(out) + len(nxt) > budget:
                        raise ResourceLimitError(
                            f"site {i} exceeds the remaining simplex limit {budget}"
                        )
        if not nxt:
            break
        out.extend(nxt)
        layer = nxt
    return out


def _site_batch(items, sched, geom, k, max_dim, budget):
    return [(i, _site_simplices(i, J, sched, geom, k, max_dim, budget)) for i, J in items]


def _facets(sigma):
    return [sigma[:j] + sigma[j + 1 :] for j in range(len(sigma))] if len(sigma) > 1 else []


def build_filtration(P, params, *, limit_simplices=None, n_jobs=1, permutation=None):
    """Compute the discrete sparse k-th order Cech filtration of ``P``.

    Parameters
    ----------
    P : PointCloud or array of shape (n, d)
    params : Params
    limit_simplices : int, optional
        Raise :class:`ResourceLimitError` when the output would exceed this.
    n_jobs : int
        Worker processes for the per-site generation (joblib semantics).
    permutation : KPermutation, optional
        Precomputed k-distance permutation of ``P``.

    Returns
    -------
    SparseFiltration
    """
    P = P if isinstance(P, PointCloud) else PointCloud(P)
    k = check_k(params.k, P.n)
    perm = permutation if permutation is not None else kdp_fast(P, k)
    sched = SiteSchedule(perm.lambdas, params.eps_prime)
    geom = LensGeometry(P.points[perm.order], seed=params.seed)
    n = P.n

    # Friends are found sequentially: the index holds positions 0 .. i-1.
    index = GridIndex(np.asarray(geom.sites), range(n))
    work = []
    for i in range(n - 1, k - 1, -1):
        index.delete(i)
        J = friends(i, sched, geom, index)
        reach = 2.0 * sched.omega[i]
        assert all(geom.distance(i, j) <= reach for j in J)
        work.append((i, J))

    if n_jobs == 1 or len(work) < 2:
        results = []
        total = 0
        for i, J in work:
            budget = None if limit_simplices is None else limit_simplices - total
            buf = _site_simplices(i, J, sched, geom, k, params.max_dim, budget)
            total += len(buf)
            if limit_simplices is not None and total > limit_simplices:
                raise ResourceLimitError(
                    f"sparse filtration exceeds {limit_simplices} simplices"
                )
            results.append((i, buf))
    else:
        from joblib import Parallel, delayed, effective_n_jobs

        nw = effective_n_jobs(n_jobs)
        chunks = [work[w::nw] for w in range(nw)]
        parts = Parallel(n_jobs=nw)(
            delayed(_site_batch)(c, sched, geom, k, params.max_dim, limit_simplices)
            for c in chunks
            if c
        )
        results = [r for part in parts for r in part]

    table = {}
    associated = {}
    for i, buf in results:
        per_dim = [0] * (params.max_dim + 1)
        for sigma, z in buf:
            table[sigma] = z
            per_dim[len(sigma) - 1] += 1
        associated[i] = per_dim
    seed_lens = tuple(range(k))
    table[(seed_lens,)] = vertex_check(seed_lens, math.inf, sched, geom)
    if limit_simplices is not None and len(table) > limit_simplices:
        raise ResourceLimitError(f"sparse filtration exceeds {limit_simplices} simplices")

    finite = [z for z in table.values() if not math.isinf(z)]
    zmin = None
    if len(finite) < len(table):
        zmin = (min(finite) - 1) if finite else 0
        for sigma, z in table.items():
            if math.isinf(z):
                table[sigma] = zmin

    # Faces of present simplices are present no later; enforce it explicitly
    # so borderline floating-point decisions cannot break the filtration.
    repairs = 0
    for dim in range(params.max_dim, 0, -1):
        for sigma in [s for s in table if len(s) == dim + 1]:
            z = table[sigma]
            for face in _facets(sigma):
                old = table.get(face)
                if old is None or old > z:
                    table[face] = z
                    repairs += 1

    base = 1.0 + params.eps_prime
    simplices = [
        FilteredSimplex(sigma, z, base**z)
        for sigma, z in sorted(table.items(), key=lambda t: (t[1], len(t[0]), t[0]))
    ]
    stats = {"associated": associated, "repairs": repairs, "n": n}
    return SparseFiltration(simplices, params, perm, zmin=zmin, stats=stats)
