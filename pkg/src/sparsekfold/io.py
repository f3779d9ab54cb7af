"""Text formats for point clouds, filtrations and persistence diagrams.

Sparse filtration files start with ``#key value`` header lines and then list
one simplex per line as ``z;value;lens|lens|...``. Each lens is written as
comma-separated input indices. The exponent is authoritative; the value is
printed with 17 significant digits and re-derived from ``z`` when reading.
"""
import math
import re

import numpy as np

from ._validation import first_duplicate
from .exceptions import IngestionError
from .kdp import KPermutation, PointCloud
from .sparse import FilteredSimplex, Params, SparseFiltration

_SPLIT = re.compile(r"[,\s]+")


def _fmt(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def parse_points(text, source="<string>"):
    """Parse one point per line; blank lines and ``#`` comments are skipped."""
    rows, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in _SPLIT.split(line) if tok]
        except ValueError as exc:
            raise IngestionError(f"{source}:{lineno}: cannot parse {raw!r}") from exc
        if not all(math.isfinite(v) for v in row):
            raise IngestionError(f"{source}:{lineno}: non-finite coordinate")
        if rows and len(row) != len(rows[0]):
            raise IngestionError(
                f"{source}:{lineno}: expected {len(rows[0])} coordinates, got {len(row)}"
            )
        rows.append(row)
        lines.append(lineno)
    if not rows:
        raise IngestionError(f"{source}: no points")
    X = np.asarray(rows, dtype=float)
    dup = first_duplicate(X)
    if dup is not None:
        i, j = dup
        raise IngestionError(f"{source}:{lines[j]}: duplicate of the point on line {lines[i]}")
    return PointCloud(X)


def read_points(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_points(text, source=str(path))


def _lens_text(lens):
    return ",".join(str(i) for i in lens)


def format_filtration(filt):
    """Serialize a :class:`SparseFiltration`; the output is deterministic."""
    p = filt.params
    perm = filt.permutation
    out = [
        f"#k {p.k}",
        f"#epsilon {_fmt(p.epsilon)}",
        f"#eps_prime {_fmt(p.eps_prime)}",
        f"#perm {' '.join(str(int(i)) for i in perm.order)}",
        f"#lambdas {' '.join(_fmt(float(v)) for v in perm.lambdas)}",
        f"#max_dim {p.max_dim}",
        f"#seed {p.seed}",
        f"#zmin {'none' if filt.zmin is None else filt.zmin}",
    ]
    for s in filt.simplices:
        lenses = "|".join(_lens_text(filt.lens_sites(A)) for A in s.vertices)
        out.append(f"{s.z};{_fmt(s.value)};{lenses}")
    return "\n".join(out) + "\n"


def parse_filtration(text):
    """Inverse of :func:`format_filtration`."""
    header = {}
    body = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(" ")
            header[key] = val.strip()
        else:
            body.append((lineno, line))
    try:
        params = Params(
            int(header["k"]),
            float(header["epsilon"]),
            int(header.get("max_dim", 1)),
            int(header.get("seed", 0)),
        )
        order = [int(t) for t in header["perm"].split()]
    except (KeyError, ValueError) as exc:
        raise IngestionError(f"bad filtration header: {exc}") from exc
    lambdas = (
        [float(t) for t in header["lambdas"].split()]
        if "lambdas" in header
        else [math.nan] * len(order)
    )
    if "eps_prime" in header and float(header["eps_prime"]) != params.eps_prime:
        raise IngestionError("eps_prime does not match epsilon / 3")
    position = {site: pos for pos, site in enumerate(order)}
    base = 1.0 + params.eps_prime
    simplices = []
    for lineno, line in body:
        try:
            z_txt, _value, lens_txt = line.split(";")
            z = int(z_txt)
            verts = tuple(
                sorted(
                    tuple(sorted(position[int(t)] for t in lens.split(",")))
                    for lens in lens_txt.split("|")
                )
            )
        except (ValueError, KeyError) as exc:
            raise IngestionError(f"line {lineno}: cannot parse simplex {line!r}") from exc
        simplices.append(FilteredSimplex(verts, z, base**z))
    zmin = header.get("zmin", "none")
    perm = KPermutation(order, lambdas, params.k)
    return SparseFiltration(
        simplices, params, perm, zmin=None if zmin == "none" else int(zmin)
    )


def write_filtration(filt, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_filtration(filt))


def read_filtration(path):
    with open(path, encoding="utf-8") as fh:
        return parse_filtration(fh.read())


def format_exact(filt):
    """Serialize an exact filtration as ``value;lens|lens`` lines."""
    out = [f"#k {filt.k}", f"#max_dim {filt.max_dim}"]
    for s in filt.simplices:
        out.append(f"{_fmt(s.value)};{'|'.join(_lens_text(A) for A in s.vertices)}")
    return "\n".join(out) + "\n"


def format_diagram(diagram):
    """One ``dim birth death`` line per point, death may be ``inf``."""
    lines = []
    for d in diagram.dims:
        for b, e in diagram[d]:
            lines.append(f"{d} {_fmt(float(b))} {_fmt(float(e))}")
    return "\n".join(lines) + ("\n" if lines else "")
