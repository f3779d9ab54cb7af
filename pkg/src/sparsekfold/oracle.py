"""Brute-force references used to check the sparse construction.

Nothing here is fast. The exact k-th order Cech filtration enumerates every
lens and every combination of lenses, radii come from support-subset
enumeration rather than the randomized solvers in :mod:`geometry`, and the
lemma validators test the k-distance permutation exhaustively or by sampling.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ._validation import check_k, check_max_dim
from .exceptions import ResourceLimitError
from .geometry import intersection_margin, leq
from .kdp import PointCloud, k_distance
from .sparse import (
    LensGeometry,
    SiteSchedule,
    _balls_at,
    ceil_exponent,
    cones_intersect_at,
    simplex_status,
)

DEFAULT_LIMIT_VERTICES = 100_000
DEFAULT_LIMIT_SIMPLICES = 2_000_000

_SUBSETS = {}


def _subsets(n, s):
    key = (n, s)
    idx = _SUBSETS.get(key)
    if idx is None:
        idx = np.array(list(itertools.combinations(range(n), s)), dtype=np.intp)
        _SUBSETS[key] = idx
    return idx


def brute_force_meb_radius(points, hull=True):
    """Enclosing radius by trying every support set of at most d + 1 points.

    Each affinely independent subset gives the smallest sphere through it;
    the answer is the smallest such sphere containing all points. With
    ``hull=True`` candidates are restricted to convex hull vertices, which
    is where any support must lie.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("expected a nonempty (n, d) array")
    n, d = X.shape
    if n == 1:
        return 0.0
    cand = X
    if hull and d >= 2 and n > d + 1:
        try:
            cand = X[ConvexHull(X).vertices]
        except (QhullError, ValueError):
            cand = X
    m = cand.shape[0]
    best = math.inf
    for s in range(2, min(m, d + 1) + 1):
        S = cand[_subsets(m, s)]
        V = S[:, 1:] - S[:, :1]
        G = V @ V.transpose(0, 2, 1)
        rhs = 0.5 * np.einsum("msd,msd->ms", V, V)
        scale = np.einsum("mii->m", G) ** (s - 1)
        ok = np.abs(np.linalg.det(G)) > 1e-10 * scale
        if not ok.any():
            continue
        V, G, rhs, S = V[ok], G[ok], rhs[ok], S[ok]
        mu = np.linalg.solve(G, rhs[..., None])[..., 0]
        y = np.einsum("ms,msd->md", mu, V)
        c = S[:, 0] + y
        r2 = np.einsum("md,md->m", y, y)
        d2 = ((X[None] - c[:, None]) ** 2).sum(-1)
        inside = (d2 <= r2[:, None] * (1.0 + 1e-9) + 1e-300).all(axis=1)
        if inside.any():
            best = min(best, float(r2[inside].min()))
    return math.sqrt(best)


class ExactSimplex(NamedTuple):
    vertices: Tuple[Tuple[int, ...], ...]
    value: float

    @property
    def dim(self):
        return len(self.vertices) - 1


@dataclass
class ExactFiltration:
    """Exact k-th order Cech filtration; lenses are sorted input-index tuples."""

    simplices: list
    points: np.ndarray
    k: int
    max_dim: int
    r_max: float = math.inf
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def radius_of(self, sigma):
        return cech_radius(self.points, sigma, self._cache)

    def count_by_dim(self):
        counts = [0] * (self.max_dim + 1)
        for s in self.simplices:
            counts[s.dim] += 1
        return counts


def cech_radius(points, sigma, cache=None):
    """Smallest radius at which all lenses of ``sigma`` share a point.

    Lenses of equal-radius balls intersect exactly when all involved balls
    do, so this is the enclosing radius of the union of their sites.
    """
    sites = frozenset(itertools.chain.from_iterable(sigma))
    if cache is not None and sites in cache:
        return cache[sites]
    r = brute_force_meb_radius(np.asarray(points)[sorted(sites)])
    if cache is not None:
        cache[sites] = r
    return r


def exact_cech(
    P,
    k,
    max_dim,
    r_max=math.inf,
    limit_vertices=DEFAULT_LIMIT_VERTICES,
    limit_simplices=DEFAULT_LIMIT_SIMPLICES,
):
    """Enumerate the exact k-th order Cech filtration up to ``max_dim``.

    Raises
    ------
    ResourceLimitError
        If the number of lenses or of simplices exceeds its limit.
    """
    P = P if isinstance(P, PointCloud) else PointCloud(P)
    k = check_k(k, P.n)
    max_dim = check_max_dim(max_dim)
    nverts = math.comb(P.n, k)
    if limit_vertices is not None and nverts > limit_vertices:
        raise ResourceLimitError(
            f"exact filtration has {nverts} lenses, above the limit {limit_vertices}"
        )
    X = P.points
    cache = {}
    lenses = []
    out = []
    value = {}
    for A in itertools.combinations(range(P.n), k):
        r = cech_radius(X, (A,), cache)
        if leq(r, r_max):
            value[(len(lenses),)] = r
            lenses.append(A)
            out.append(ExactSimplex((A,), r))
    layer = [(j,) for j in range(len(lenses))]
    for _ in range(max_dim):
        nxt = []
        for tau in layer:
            for j in range(tau[-1] + 1, len(lenses)):
                sigma = tau + (j,)
                verts = tuple(lenses[t] for t in sigma)
                r = cech_radius(X, verts, cache)
                if not leq(r, r_max):
                    continue
                # Equal radii computed from different site sets can differ in
                # the last bits; faces must never come after their cofaces.
                for t in range(len(sigma)):
                    face = value.get(sigma[:t] + sigma[t + 1 :])
                    if face is None:
                        break
                    r = max(r, face)
                else:
                    value[sigma] = r
                    nxt.append(sigma)
                    out.append(ExactSimplex(verts, r))
                    if limit_simplices is not None and len(out) > limit_simplices:
                        raise ResourceLimitError(
                            f"exact filtration exceeds {limit_simplices} simplices"
                        )
        layer = nxt
        if not layer:
            break
    out.sort(key=lambda s: (s.value, s.dim, s.vertices))
    return ExactFiltration(out, X, k, max_dim, r_max, cache)


def grid_scan_status(sigma, sched, geom, resolution=8):
    """Critical exponent of ``sigma`` found by scanning radii, or None.

    Radii ``base ** (j / resolution)`` are tried from just below the
    enclosing radius of all sites up to the first removal radius ``w`` (which
    is tried itself). The first radius where the frozen lenses meet is
    rounded up to the discretization grid.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    base = sched.base
    lam = min(min(sched.crit[p] for p in A) for A in sigma)
    sites = sorted(set(itertools.chain.from_iterable(sigma)))
    rm = brute_force_meb_radius([geom.sites[p] for p in sites])
    if rm == 0.0:
        return -math.inf
    start = (ceil_exponent(rm, base) - 1) * resolution
    if math.isinf(lam):
        # Nothing ever freezes: the lenses meet exactly from rm on.
        j = start
        while True:
            r = base ** (j // resolution) if j % resolution == 0 else base ** (j / resolution)
            if leq(rm, r) and cones_intersect_at(sigma, r, sched, geom):
                return ceil_exponent(r, base)
            j += 1
    w = base * lam
    j = start
    while True:
        r = base ** (j // resolution) if j % resolution == 0 else base ** (j / resolution)
        if r >= w:
            r = w
        if cones_intersect_at(sigma, r, sched, geom):
            return ceil_exponent(r, base)
        if r == w:
            return None
        j += 1


class LemmaReport(NamedTuple):
    checks: int
    violations: list

    @property
    def ok(self):
        return not self.violations


def validate_packing(P, perm):
    """Check that every ordered prefix is well separated.

    For each prefix of ``i > k`` sites and each site ``p`` in it, the
    k-distance from ``p`` to the rest of the prefix must be at least half
    the insertion value of the last site. Violations are ``(i, p, kd, lam)``.
    """
    P = P if isinstance(P, PointCloud) else PointCloud(P)
    k = perm.k
    Q = P.points[perm.order]
    D = np.sqrt(((Q[:, None, :] - Q[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(D, np.inf)
    violations = []
    checks = 0
    for i in range(k + 1, P.n + 1):
        lam = float(perm.lambdas[i - 1])
        kd = np.partition(D[:i, :i], k - 1, axis=1)[:, k - 1]
        checks += i
        for p in np.nonzero(~np.array([leq(0.5 * lam, float(v)) for v in kd]))[0]:
            violations.append((i, int(perm.order[p]), float(kd[p]), lam))
    return LemmaReport(checks, violations)


def covering_witnesses(P, trials, rng):
    """Query points near sites and in the bounding box, with their radii.

    Each witness ``x`` comes with a radius ``r >= k_distance(x, P)``, so that
    ``x`` lies in the k-fold cover at radius ``r``.
    """
    X = P.points
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = float(np.max(hi - lo)) or 1.0
    half = trials // 2
    near = X[rng.integers(0, P.n, size=half)] + rng.normal(scale=0.1 * span, size=(half, P.dim))
    box = lo + (hi - lo + 0.2 * span) * rng.random((trials - half, P.dim)) - 0.1 * span
    return np.vstack([near, box])


def validate_covering(P, perm, trials=1000, seed=0):
    """Sampled check that each prefix covers what the full set covers, up to ``lam``.

    For random prefixes of ``i >= k`` sites and witnesses ``x`` in the
    k-fold cover of all sites at radius ``r``, ``x`` must lie in the k-fold
    cover of the prefix at radius ``r + lam[i+1]``. Violations are
    ``(i, x, r, prefix_kd, lam)``.
    """
    P = P if isinstance(P, PointCloud) else PointCloud(P)
    k = perm.k
    rng = np.random.default_rng(seed)
    if P.n <= k:
        return LemmaReport(0, [])
    Q = P.points[perm.order]
    xs = covering_witnesses(P, trials, rng)
    violations = []
    for x in xs:
        r = k_distance(x, Q, k) * (1.0 + rng.exponential(0.25))
        i = int(rng.integers(k, P.n))
        lam = float(perm.lambdas[i])
        kd = k_distance(x, Q[:i], k)
        if not leq(kd, r + lam):
            violations.append((i, tuple(x.tolist()), r, kd, lam))
    return LemmaReport(len(xs), violations)


def status_margin(sigma, sched, geom):
    """Smallest absolute intersection margin at the radii the three-case rule tests.

    ``inf`` when no intersection test is needed (the enclosing radius alone
    decides). Small values flag borderline instances where floating-point
    predicates may legitimately disagree.
    """
    sites = set(itertools.chain.from_iterable(sigma))
    rm = geom.radius(sites)
    lam = min(min(sched.crit[p] for p in A) for A in sigma)
    base = sched.base
    if leq(rm, lam) or not leq(rm, base * lam):
        return math.inf
    w = base * lam
    z = ceil_exponent(w, base)
    return min(
        abs(intersection_margin(_balls_at(sigma, r, sched, geom), seed=geom.seed))
        for r in (w, base ** (z - 1))
    )


def compare_with_scan(sigmas, sched, geom, margin=1e-4, resolution=8):
    """Run :func:`simplex_status` and :func:`grid_scan_status` side by side.

    Returns ``(checked, skipped, disagreements)``; candidates whose
    :func:`status_margin` is at most ``margin`` are skipped.
    """
    checked = skipped = 0
    bad = []
    for sigma in sigmas:
        if status_margin(sigma, sched, geom) <= margin:
            skipped += 1
            continue
        a = simplex_status(sigma, sched, geom)
        b = grid_scan_status(sigma, sched, geom, resolution)
        checked += 1
        if a != b:
            bad.append((sigma, a, b))
    return checked, skipped, bad


def audit_filtration(filt, points, tol=1e-9):
    """List every structural or geometric problem found in a sparse filtration.

    Checks sorting, closure under faces with monotone exponents, containment
    in the exact filtration, the ``n - k`` lower bound on its size, and that
    each simplex only involves sites near its highest-ordered site.
    """
    problems = []
    X = np.asarray(points, dtype=float)
    n, k = X.shape[0], filt.params.k
    z_of = {}
    last = None
    for s in filt.simplices:
        key = (s.z, s.dim, s.vertices)
        if last is not None and key < last:
            problems.append(f"out of order: {s.vertices}")
        last = key
        if s.vertices in z_of:
            problems.append(f"duplicate simplex {s.vertices}")
        z_of[s.vertices] = s.z
    for s in filt.simplices:
        for t in range(len(s.vertices) if s.dim > 0 else 0):
            face = s.vertices[:t] + s.vertices[t + 1 :]
            fz = z_of.get(face)
            if fz is None:
                problems.append(f"missing face {face} of {s.vertices}")
            elif fz > s.z:
                problems.append(f"face {face} enters after {s.vertices}")
    if len(filt) < n - k:
        problems.append(f"only {len(filt)} simplices, fewer than n - k = {n - k}")
    cache = {}
    for s in filt.simplices:
        r = cech_radius(X, filt.input_vertices(s), cache)
        if r > s.value * (1.0 + tol) + 1e-12:
            problems.append(f"{filt.input_vertices(s)} at {s.value} needs radius {r}")
    sched = SiteSchedule(filt.permutation.lambdas, filt.params.eps_prime)
    Q = X[filt.permutation.order]
    for s in filt.simplices:
        sites = set(itertools.chain.from_iterable(s.vertices))
        i = max(sites)
        if i < k:
            continue
        reach = 2.0 * sched.omega[i]
        far = [j for j in sites if np.linalg.norm(Q[j] - Q[i]) > reach]
        if far:
            problems.append(f"{s.vertices} involves sites beyond 2*omega of site {i}")
    return problems


def random_candidates(filt, points, count, rng):
    """Random sets of 2 or 3 distinct vertices of ``filt`` as candidate simplices."""
    verts = sorted({A for s in filt.simplices if s.dim == 0 for (A,) in [s.vertices]})
    out = []
    if len(verts) < 2:
        return out
    for _ in range(count):
        size = int(rng.integers(2, min(3, len(verts)) + 1))
        pick = rng.choice(len(verts), size=size, replace=False)
        out.append(tuple(sorted(verts[j] for j in pick)))
    return out


def schedule_and_geometry(filt, points):
    """Rebuild the schedule and site geometry a filtration was computed with."""
    sched = SiteSchedule(filt.permutation.lambdas, filt.params.eps_prime)
    geom = LensGeometry(np.asarray(points, dtype=float)[filt.permutation.order], seed=filt.params.seed)
    return sched, geom
