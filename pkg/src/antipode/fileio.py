"""Plain-text formats for distance matrices and edge lists.

Matrix file::

    n
    d00 d01 ... d0(n-1)
    ...
    w: w0 w1 ... w(n-1)        (optional)

Entries are decimal integers or fractions ``p/q``. Edge-list file: a header
``n m`` followed by ``m`` lines ``u v`` with 0-based vertices.
"""
from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path

from .errors import FormatError
from .graphs import Graph
from .metric import FiniteMetricSpace, validate_metric


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _fraction(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad number {tok!r}") from exc


def sniff(text: str) -> str:
    """``"matrix"`` or ``"edges"``, judged by the header line."""
    lines = _lines(text)
    if not lines:
        raise FormatError("empty input")
    return "matrix" if len(lines[0].split()) == 1 else "edges"


def parse_matrix(text: str):
    """Return ``(rows, weights)`` as Fractions; ``weights`` is ``None`` if absent."""
    lines = _lines(text)
    try:
        n = int(lines[0])
    except (IndexError, ValueError) as exc:
        raise FormatError("first line must be the point count n") from exc
    weights = None
    if lines and lines[-1].startswith("w:"):
        weights = [_fraction(t) for t in lines[-1][2:].split()]
        lines = lines[:-1]
    rows = [[_fraction(t) for t in ln.split()] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"expected {n} rows of {n} entries")
    if weights is not None and len(weights) != n:
        raise FormatError(f"expected {n} weights")
    return rows, weights


def read_matrix(text: str) -> FiniteMetricSpace:
    rows, weights = parse_matrix(text)
    return validate_metric(rows, weights)


def format_matrix(X: FiniteMetricSpace, with_weights: bool = False) -> str:
    out = [str(X.n)]
    for row in X.numer:
        out.append(" ".join(str(Fraction(int(v), X.denom)) for v in row))
    if with_weights:
        out.append("w: " + " ".join(str(w) for w in X.weights))
    return "\n".join(out) + "\n"


def read_edge_list(text: str, name: str = "") -> Graph:
    lines = _lines(text)
    try:
        n, m = (int(t) for t in lines[0].split())
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise FormatError("edge list needs a header 'n m' and integer endpoints") from exc
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise FormatError(f"expected {m} lines of 'u v'")
    if any(not (0 <= u < n and 0 <= v < n) or u == v for u, v in edges):
        raise FormatError("edge endpoint out of range or self-loop")
    if len({tuple(sorted(e)) for e in edges}) != m:
        raise FormatError("repeated edge")
    return Graph.from_edges(n, edges, name)


def format_edge_list(g: Graph) -> str:
    edges = g.edges()
    return f"{g.n} {len(edges)}\n" + "".join(f"{u} {v}\n" for u, v in edges.tolist())


def content_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
