"""Euclidean predicates on points and closed balls.

Points are plain sequences of floats. All radius comparisons exposed to other
modules go through :func:`leq` / :func:`geq`, which apply one tolerance
policy: relative ``REL_TOL``, with an absolute floor ``ABS_TOL`` near zero.
"""
import itertools
import math
import random
from typing import NamedTuple, Sequence, Tuple

import numpy as np

REL_TOL = 1e-9
ABS_TOL = 1e-12

# Tighter slack used inside the enclosing-ball solvers, so that the returned
# radius is accurate well below REL_TOL.
_INNER_TOL = 1e-12

Point = Tuple[float, ...]


class Ball(NamedTuple):
    center: Point
    radius: float


class MebResult(NamedTuple):
    center: Point
    radius: float
    support: Tuple[int, ...]


def leq(a, b):
    """``a <= b`` up to the library tolerance. Infinite values compare exactly."""
    if math.isinf(a) or math.isinf(b):
        return a <= b
    return a <= b + max(REL_TOL * max(abs(a), abs(b)), ABS_TOL)


def geq(a, b):
    return leq(b, a)


def squared_distance(a, b):
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} != {len(b)}")
    return math.fsum((x - y) ** 2 for x, y in zip(a, b))


def distance(a, b):
    return math.sqrt(squared_distance(a, b))


def _as_points(points):
    pts = [tuple(float(c) for c in p) for p in points]
    if not pts:
        raise ValueError("empty input")
    dim = len(pts[0])
    if dim < 1:
        raise ValueError("points must have at least one coordinate")
    for p in pts:
        if len(p) != dim:
            raise ValueError(f"dimension mismatch: {len(p)} != {dim}")
        if not all(math.isfinite(c) for c in p):
            raise ValueError(f"non-finite coordinate in {p}")
    return pts, dim


def _solve(A, b):
    """Solve a small dense system by Gaussian elimination; None if singular."""
    n = len(b)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    scale = max((abs(v) for row in A for v in row), default=0.0)
    if scale == 0.0:
        return None
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) <= 1e-13 * scale:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = 1.0 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f:
                Mr, Mc = M[r], M[col]
                for c in range(col, n + 1):
                    Mr[c] -= f * Mc[c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = M[r][n] - sum(M[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / M[r][r]
    return x


def _affine_frame(centers):
    """Edge vectors from the first center and their Gram matrix."""
    x0 = centers[0]
    vs = [tuple(a - b for a, b in zip(x, x0)) for x in centers[1:]]
    gram = [[sum(a * b for a, b in zip(u, v)) for v in vs] for u in vs]
    return x0, vs, gram


def _circumball(pts):
    """Center and squared radius of the smallest sphere through ``pts``.

    The center lies in the affine hull of ``pts``. Returns None for an
    affinely dependent support.
    """
    x0 = pts[0]
    if len(pts) == 1:
        return x0, 0.0
    _, vs, gram = _affine_frame(pts)
    rhs = [0.5 * sum(c * c for c in v) for v in vs]
    mu = _solve(gram, rhs)
    if mu is None:
        return None
    y = [sum(m * v[i] for m, v in zip(mu, vs)) for i in range(len(x0))]
    center = tuple(a + b for a, b in zip(x0, y))
    return center, sum(c * c for c in y)


def _inside(p, center, r2):
    d2 = 0.0
    for a, b in zip(p, center):
        d2 += (a - b) ** 2
    return d2 <= r2 * (1.0 + 2 * _INNER_TOL) + 1e-300


def _mtf(pts, order, end, support, dim):
    """Move-to-front Welzl recursion over ``order[:end]`` with fixed ``support``."""
    best = _circumball([pts[i] for i in support]) if support else None
    best_support = list(support)
    if best is None and support:
        # Numerically dependent support: fall back to a least-squares center.
        best = _lstsq_circumball([pts[i] for i in support])
    if len(support) == dim + 1:
        return best, best_support
    i = 0
    while i < end:
        j = order[i]
        if best is None or not _inside(pts[j], best[0], best[1]):
            best, best_support = _mtf(pts, order, i, support + [j], dim)
            del order[i]
            order.insert(0, j)
        i += 1
    return best, best_support


def _lstsq_circumball(pts):
    P = np.asarray(pts, dtype=float)
    V = P[1:] - P[0]
    rhs = 0.5 * np.einsum("ij,ij->i", V, V)
    mu = np.linalg.lstsq(V @ V.T, rhs, rcond=None)[0]
    y = mu @ V
    r2 = float(max(np.max(np.sum((P - (P[0] + y)) ** 2, axis=1)), 0.0))
    return tuple((P[0] + y).tolist()), r2


def _small_meb(pts):
    """Closed form for one, two or three points."""
    if len(pts) == 1:
        return MebResult(pts[0], 0.0, (0,))
    pairs = sorted(
        itertools.combinations(range(len(pts)), 2),
        key=lambda ij: -squared_distance(pts[ij[0]], pts[ij[1]]),
    )
    i, j = pairs[0]
    center = tuple(0.5 * (a + b) for a, b in zip(pts[i], pts[j]))
    r2 = 0.25 * squared_distance(pts[i], pts[j])
    if len(pts) == 2 or _inside(pts[3 - i - j], center, r2):
        return MebResult(center, math.sqrt(r2), (i, j))
    ball = _circumball(pts)
    if ball is None:
        ball = _lstsq_circumball(pts)
    return MebResult(tuple(ball[0]), math.sqrt(ball[1]), (0, 1, 2))


def min_enclosing_ball(points: Sequence[Sequence[float]], seed: int = 0) -> MebResult:
    """Smallest ball containing ``points``.

    Welzl's randomized algorithm in its move-to-front form; the initial order
    is a shuffle seeded by ``seed``, so the output is reproducible.

    Parameters
    ----------
    points : sequence of d-dimensional points, nonempty
    seed : int

    Returns
    -------
    MebResult
        ``support`` lists input indices of the points on the boundary that
        determine the ball (at most d + 1 of them).
    """
    pts, dim = _as_points(points)
    if len(pts) <= 3:
        return _small_meb(pts)
    order = list(range(len(pts)))
    random.Random(seed).shuffle(order)
    (center, r2), support = _mtf(pts, order, len(order), [], dim)
    return MebResult(tuple(center), math.sqrt(r2), tuple(sorted(support)))


def _tangent_candidates(centers, radii):
    """Balls internally tangent to every given ball, center in their affine hull.

    Solves ``|c - x_j| = R - r_j`` for all j. There are at most two solutions;
    both are returned and the caller keeps the feasible one.
    """
    x0, r0 = centers[0], radii[0]
    if len(centers) == 1:
        return [(x0, r0)]
    _, vs, gram = _affine_frame(centers)
    a = [0.5 * (sum(c * c for c in v) - rj * rj + r0 * r0) for v, rj in zip(vs, radii[1:])]
    b = [rj - r0 for rj in radii[1:]]
    mu_a = _solve(gram, a)
    if mu_a is None:
        return []
    mu_b = _solve(gram, b)
    dim = len(x0)
    p = [sum(m * v[i] for m, v in zip(mu_a, vs)) for i in range(dim)]
    q = [sum(m * v[i] for m, v in zip(mu_b, vs)) for i in range(dim)]
    qa = sum(c * c for c in q) - 1.0
    qb = 2.0 * (sum(u * v for u, v in zip(p, q)) + r0)
    qc = sum(c * c for c in p) - r0 * r0
    roots = []
    if abs(qa) < 1e-14:
        if qb != 0.0:
            roots.append(-qc / qb)
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            if disc < -1e-12 * (qb * qb + abs(4.0 * qa * qc)):
                return []
            disc = 0.0
        sq = math.sqrt(disc)
        # Numerically stable pair of roots.
        t = -0.5 * (qb + math.copysign(sq, qb))
        if t != 0.0:
            roots.extend((t / qa, qc / t))
        else:
            roots.append(0.0)
    rmax = max(radii)
    out = []
    for R in roots:
        if R >= rmax - 1e-12 * max(1.0, abs(rmax)):
            c = tuple(x + pi + R * qi for x, pi, qi in zip(x0, p, q))
            out.append((c, max(R, rmax)))
    return out


def _encloses(center, R, x, r):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, center))) + r <= R * (
        1.0 + 4 * _INNER_TOL
    ) + 1e-300


def _supports(idx, dim, must):
    for size in range(1, min(len(idx), dim + 1) + 1):
        if must is None:
            yield from itertools.combinations(idx, size)
        else:
            rest = [i for i in idx if i != must]
            for T in itertools.combinations(rest, size - 1):
                yield T + (must,)


def _basis(idx, centers, radii, dim, must=None):
    """Enclosing ball of a set of at most d + 2 balls, by support enumeration.

    ``must`` names a ball known to touch the answer from inside, which
    restricts the supports tried.
    """
    best = None
    for T in _supports(idx, dim, must):
        for c, R in _tangent_candidates([centers[i] for i in T], [radii[i] for i in T]):
            if best is not None and R >= best[2]:
                continue
            if all(_encloses(c, R, centers[i], radii[i]) for i in idx):
                best = (T, c, R)
    if best is None and must is not None:
        return _basis(idx, centers, radii, dim)
    if best is None:
        # Degenerate configuration: accept the least-violating candidate.
        best = min(
            (
                (T, c, max(R, max(math.dist(c, centers[i]) + radii[i] for i in idx)))
                for T in _supports(idx, dim, None)
                for c, R in _tangent_candidates([centers[i] for i in T], [radii[i] for i in T])
            ),
            key=lambda t: t[2],
        )
    return best


def min_enclosing_ball_of_balls(balls: Sequence[Ball], seed: int = 0) -> MebResult:
    """Smallest ball containing every input ball.

    Randomized LP-type recursion (Matousek-Sharir-Welzl) with expected time
    linear in the number of balls for fixed dimension. Bases of at most
    ``d + 2`` balls are solved by enumerating internally tangent supports.
    """
    if len(balls) == 0:
        raise ValueError("empty input")
    centers, dim = _as_points([b[0] for b in balls])
    radii = [float(b[1]) for b in balls]
    for r in radii:
        if not (math.isfinite(r) and r >= 0.0):
            raise ValueError(f"radius must be finite and nonnegative, got {r}")
    n = len(centers)
    order = list(range(n))
    rng = random.Random(seed)
    rng.shuffle(order)

    def solve(m, C, ball):
        # Computes the basis of order[:m], where C is a basis contained in it.
        while True:
            if m == len(C):
                return C, ball
            in_c = set(C)
            while True:
                pos = rng.randrange(m)
                if order[pos] not in in_c:
                    break
            order[pos], order[m - 1] = order[m - 1], order[pos]
            h = order[m - 1]
            C2, ball2 = solve(m - 1, C, ball)
            if _encloses(ball2[0], ball2[1], centers[h], radii[h]):
                return C2, ball2
            C, c, R = _basis(C2 + (h,), centers, radii, dim, must=h)
            ball = (c, R)

    # The empty basis is represented by a ball of radius -inf, violated by all.
    C, (c, R) = solve(n, (), (centers[0], -math.inf))
    return MebResult(tuple(c), R, tuple(sorted(C)))


def balls_have_common_point(balls: Sequence[Ball], seed: int = 0) -> bool:
    """Whether the closed balls share a point.

    Radii are normalized by their maximum ``s``; each ball is replaced by a
    concentric ball of radius ``1 - r/s`` and the balls intersect iff the
    shrunk balls fit inside a ball of radius one.
    """
    if len(balls) == 0:
        raise ValueError("empty input")
    centers, _ = _as_points([b[0] for b in balls])
    radii = [float(b[1]) for b in balls]
    if any(r < 0.0 for r in radii):
        raise ValueError("negative radius")
    s = max(radii)
    if s == 0.0:
        c0 = centers[0]
        return all(math.dist(c, c0) <= ABS_TOL for c in centers)
    # Cheap certificates first: a disjoint pair, or the center of the
    # smallest ball around the centers lying in every ball.
    for (a, ra), (b, rb) in itertools.combinations(zip(centers, radii), 2):
        if not leq(math.dist(a, b), ra + rb):
            return False
    w = min_enclosing_ball(centers, seed=seed).center
    if all(math.dist(w, c) < r * (1.0 - 1e-9) for c, r in zip(centers, radii)):
        return True
    shrunk = [
        Ball(tuple(x / s for x in c), 1.0 - r / s) for c, r in zip(centers, radii)
    ]
    return leq(min_enclosing_ball_of_balls(shrunk, seed=seed).radius, 1.0)


def intersection_margin(balls: Sequence[Ball], seed: int = 0) -> float:
    """``max_x min_j (r_j - |x - x_j|)``: positive iff the interiors intersect."""
    s = max(float(b[1]) for b in balls)
    grown = [Ball(tuple(b[0]), s - float(b[1])) for b in balls]
    return s - min_enclosing_ball_of_balls(grown, seed=seed).radius
