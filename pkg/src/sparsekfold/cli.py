"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 unreadable or invalid input,
3 resource guard hit, 4 verification failure.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from . import io, oracle
from .exceptions import (
    IngestionError,
    ResourceLimitError,
    SparseKFoldError,
    VerificationError,
)
from .kdp import PointCloud, kdp_fast, kdp_simple
from .persistence import compute_persistence
from .sparse import Params, build_filtration, gamma_bound, size_bound

MODES = ("sparse", "exact", "compare", "persistence", "verify")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(
        prog="sparsekfold",
        description="Sparse approximation of the k-fold Cech filtration of a point set.",
    )
    p.add_argument("input", help="point file: one point per line, whitespace or comma separated")
    p.add_argument("--k", type=int, default=1, help="order of the cover (default: 1)")
    p.add_argument("--epsilon", type=float, default=1.0, help="approximation factor in (0, 1]")
    p.add_argument("--max-dim", type=int, default=1, help="highest simplex dimension")
    p.add_argument("--mode", choices=MODES, default="sparse")
    p.add_argument("--seed", type=int, default=None, help="overrides $SPARSEKFOLD_SEED")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--limit-simplices", type=int, default=oracle.DEFAULT_LIMIT_SIMPLICES)
    p.add_argument("--limit-vertices", type=int, default=oracle.DEFAULT_LIMIT_VERTICES)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the sparse build")
    p.add_argument(
        "--source",
        choices=("sparse", "exact"),
        default="sparse",
        help="filtration used by --mode persistence",
    )
    p.add_argument("--delta", type=float, default=None, help="doubling dimension for the size bound (default: d)")
    p.add_argument("--instances", type=int, default=25, help="random instances checked by --mode verify")
    return p


def resolve_seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get("SPARSEKFOLD_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise SparseKFoldError(f"SPARSEKFOLD_SEED must be an integer, got {env!r}") from None


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def size_report(P, filt, delta, exact_count=None):
    p = filt.params
    counts = filt.count_by_dim()
    gamma = gamma_bound(p.k, p.epsilon, delta)
    per_site = [0] * (p.max_dim + 1)
    for row in filt.stats["associated"].values():
        per_site = [max(a, b) for a, b in zip(per_site, row)]
    return {
        "n": P.n,
        "d": P.dim,
        "k": p.k,
        "epsilon": p.epsilon,
        "max_dim": p.max_dim,
        "delta": delta,
        "simplices": len(filt),
        "simplices_by_dim": counts,
        "lower_bound": P.n - p.k,
        "lower_bound_holds": len(filt) >= P.n - p.k,
        "gamma": gamma,
        "size_bound": size_bound(P.n, p.k, p.epsilon, delta, p.max_dim + 1),
        "max_associated_by_dim": per_site,
        "associated_bound_by_dim": [gamma ** (p.k * (q + 1)) for q in range(p.max_dim + 1)],
        "exact_simplices": exact_count,
        "repairs": filt.stats["repairs"],
    }


def verify_instance(P, params, scan_candidates=40, covering_trials=200):
    """Problems found by the lemma suite and oracle cross-checks on one input."""
    problems = []
    rng = np.random.default_rng(params.seed)
    fast, simple = kdp_fast(P, params.k), kdp_simple(P, params.k)
    if fast != simple:
        problems.append("fast and simple k-distance permutations differ")
    pack = oracle.validate_packing(P, fast)
    problems += [f"packing violated: {v}" for v in pack.violations]
    cover = oracle.validate_covering(P, fast, trials=covering_trials, seed=params.seed)
    problems += [f"covering violated: {v}" for v in cover.violations]
    filt = build_filtration(P, params, permutation=fast)
    problems += oracle.audit_filtration(filt, P.points)
    sched, geom = oracle.schedule_and_geometry(filt, P.points)
    cands = oracle.random_candidates(filt, P.points, scan_candidates, rng)
    _, _, bad = oracle.compare_with_scan(cands, sched, geom)
    problems += [f"three-case rule disagrees with scan on {b[0]}: {b[1]} vs {b[2]}" for b in bad]
    return problems


def run_verify(P, params, instances):
    report = {"input": None, "instances": instances, "failures": []}
    if P.n <= 12 and math.comb(P.n, params.k) <= 300:
        report["input"] = verify_instance(P, params)
    else:
        fast = kdp_fast(P, params.k)
        report["input"] = [f"packing violated: {v}" for v in oracle.validate_packing(P, fast).violations]
        if fast != kdp_simple(P, params.k):
            report["input"].append("fast and simple k-distance permutations differ")
    rng = np.random.default_rng(params.seed)
    for t in range(instances):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(1, 3))
        eps = float(rng.choice([0.5, 1.0]))
        X = rng.random((n, 2))
        sub = Params(k, eps, min(params.max_dim, 2), seed=params.seed + t)
        problems = verify_instance(PointCloud(X), sub)
        if problems:
            report["failures"].append({"instance": t, "problems": problems})
    return report


def run(args):
    seed = resolve_seed(args.seed)
    params = Params(args.k, args.epsilon, args.max_dim, seed)
    P = io.read_points(args.input)
    if P.n < params.k:
        raise IngestionError(f"need at least k={params.k} points, got {P.n}")
    limit = args.limit_simplices

    if args.mode == "sparse":
        filt = build_filtration(P, params, limit_simplices=limit, n_jobs=args.jobs)
        _emit(io.format_filtration(filt), args.out)
    elif args.mode == "exact":
        ex = oracle.exact_cech(P, params.k, params.max_dim, limit_vertices=args.limit_vertices, limit_simplices=limit)
        _emit(io.format_exact(ex), args.out)
    elif args.mode == "compare":
        filt = build_filtration(P, params, limit_simplices=limit, n_jobs=args.jobs)
        try:
            ex = oracle.exact_cech(P, params.k, params.max_dim, limit_vertices=args.limit_vertices, limit_simplices=limit)
            exact_count = len(ex)
        except ResourceLimitError:
            exact_count = None
        delta = args.delta if args.delta is not None else float(P.dim)
        report = size_report(P, filt, delta, exact_count)
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    elif args.mode == "persistence":
        if args.source == "sparse":
            simplices = build_filtration(P, params, limit_simplices=limit, n_jobs=args.jobs).simplices
        else:
            simplices = oracle.exact_cech(
                P, params.k, params.max_dim, limit_vertices=args.limit_vertices, limit_simplices=limit
            ).simplices
        diagram = compute_persistence(simplices, max(params.max_dim - 1, 0))
        _emit(io.format_diagram(diagram), args.out)
    else:
        report = run_verify(P, params, args.instances)
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
        if report["input"] or report["failures"]:
            raise VerificationError("verification found violations")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except SparseKFoldError as exc:
        print(f"sparsekfold: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"sparsekfold: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
