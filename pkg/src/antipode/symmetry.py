"""Automorphism search and vertex-transitivity certification.

Color refinement is the 1-dimensional Weisfeiler-Leman procedure, done
exactly: a vertex's signature is its color followed by the sorted
``(neighbor color, count)`` pairs, and new colors are the lexicographic ranks
of the signatures. Ranking keeps the procedure equivariant, which is what
lets the backtracking search compare branches by their refinement traces.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import Inconclusive
from .graphs import Graph, is_automorphism
from .groups import AutomorphismSet
from .metric import FiniteMetricSpace

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class ColoredPartition:
    colors: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.colors)
        _, ranks = np.unique(labels, return_inverse=True)
        object.__setattr__(self, "colors", ranks.astype(np.int64).ravel())

    @classmethod
    def uniform(cls, n: int) -> "ColoredPartition":
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def num_classes(self) -> int:
        return int(self.colors.max()) + 1 if self.colors.size else 0

    def classes(self) -> list[tuple[int, ...]]:
        return [tuple(np.flatnonzero(self.colors == c).tolist()) for c in range(self.num_classes)]

    @property
    def discrete(self) -> bool:
        return self.num_classes == self.colors.size


class _BudgetExhausted(Exception):
    pass


class _Refiner:
    """Equitable refinement over CSR adjacency, optionally with edge labels.

    With labels, a signature pair becomes ``(label, neighbor color)``.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, labels: np.ndarray | None = None,
                 budget: int | None = None):
        self.n = indptr.size - 1
        self.indices = indices
        self.src = np.repeat(np.arange(self.n), np.diff(indptr))
        self.labels = labels
        self.budget = budget
        self.nodes = 0

    @classmethod
    def for_graph(cls, g: Graph, budget: int | None = None) -> "_Refiner":
        return cls(g.indptr, g.indices, None, budget)

    def __call__(self, colors: np.ndarray) -> tuple[np.ndarray, int, bytes]:
        """Coarsest equitable refinement plus a digest of the refinement trace."""
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _BudgetExhausted
        n = self.n
        _, colors = np.unique(colors, return_inverse=True)
        colors = colors.ravel()
        k = int(colors.max()) + 1 if n else 0
        h = hashlib.blake2b(digest_size=16)
        while True:
            if self.indices.size:
                key = colors[self.indices]
                if self.labels is not None:
                    key = self.labels * k + key
                span = k if self.labels is None else k * (int(self.labels.max()) + 1)
                uk, cnt = np.unique(self.src * span + key, return_counts=True)
                v, c = uk // span, uk % span
                pos = np.arange(uk.size) - np.searchsorted(v, v, side="left")
                width = int(pos.max()) + 1
            else:
                width = 0
            sig = np.full((n, 1 + 2 * width), -1, dtype=np.int64)
            sig[:, 0] = colors
            if width:
                sig[v, 1 + 2 * pos] = c
                sig[v, 2 + 2 * pos] = cnt
            rows, inv = np.unique(sig, axis=0, return_inverse=True)
            inv = inv.ravel()
            h.update(rows.tobytes())
            h.update(np.bincount(inv).tobytes())
            colors = inv
            if rows.shape[0] == k:
                return colors, k, h.digest()
            k = rows.shape[0]


def _individualize(colors: np.ndarray, v: int) -> np.ndarray:
    # v keeps the lower half of its old class, the rest of the class moves up
    bump = (colors == colors[v]) & (np.arange(colors.size) != v)
    return 2 * colors + bump


def _target_cell(colors: np.ndarray) -> np.ndarray:
    """Vertices of the largest non-singleton class (lowest color on ties)."""
    counts = np.bincount(colors)
    counts[counts < 2] = 0
    return np.flatnonzero(colors == int(np.argmax(counts)))


def refine_colors(g: Graph, initial: ColoredPartition | None = None) -> ColoredPartition:
    """Coarsest equitable partition refining ``initial`` (uniform by default)."""
    start = ColoredPartition.uniform(g.n) if initial is None else initial
    colors, _, _ = _Refiner.for_graph(g)(start.colors)
    return ColoredPartition(colors)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def absorb(self, perm):
        for i, j in enumerate(perm.tolist()):
            a, b = self.find(i), self.find(j)
            if a != b:
                self.parent[max(a, b)] = min(a, b)


def automorphism_search(g: Graph, budget: int = DEFAULT_BUDGET,
                        initial: ColoredPartition | None = None) -> AutomorphismSet:
    """Generators of ``Aut(g)`` by individualization-refinement backtracking.

    The first path individualizes the first vertex of the largest
    non-singleton class until the partition is discrete. Walking back up,
    level ``l`` tries every vertex ``w`` of that level's target cell that is
    not yet in the orbit of the base point, searching ``w``'s subtree for a
    leaf that yields an automorphism fixing the earlier base points. The
    result is a strong generating set, so the group order is the product of
    the basic orbit lengths. If ``budget`` refinement nodes run out, the
    generators found so far are returned with ``truncated`` set.
    """
    start = None if initial is None else initial.colors
    return _search(g.n, _Refiner.for_graph(g, budget), lambda p: is_automorphism(g, p), start)


def isometry_search(X: FiniteMetricSpace, budget: int = DEFAULT_BUDGET) -> AutomorphismSet:
    """Generators of the isometry group of a finite metric space.

    Same backtracking as :func:`automorphism_search`, run on the complete
    graph whose edges are labelled by distance.
    """
    n = X.n
    off = ~np.eye(n, dtype=bool)
    _, labels = np.unique(X.numer[off], return_inverse=True)
    indptr = np.arange(n + 1, dtype=np.int64) * max(n - 1, 0)
    indices = np.nonzero(off)[1].astype(np.int64)
    refine = _Refiner(indptr, indices, labels.ravel().astype(np.int64), budget)

    def verify(p):
        return bool(np.array_equal(X.numer[p][:, p], X.numer))

    return _search(n, refine, verify, None)


def _search(n, refine, verify, start) -> AutomorphismSet:
    if start is None:
        start = np.zeros(n, dtype=np.int64)
    gens: list[np.ndarray] = []
    bases: list[int] = []
    order: int | None = 1
    truncated = False
    try:
        cur, k, dig = refine(start)
        path, digests, cells = [cur], [dig], []
        while k < n:
            cell = _target_cell(cur)
            bases.append(int(cell[0]))
            cells.append(cell)
            cur, k, dig = refine(_individualize(cur, int(cell[0])))
            path.append(cur)
            digests.append(dig)
        leaf = cur
        uf = _UnionFind(n)
        for lev in reversed(range(len(bases))):
            base = bases[lev]
            for w in cells[lev].tolist():
                if uf.find(w) == uf.find(base):
                    continue
                perm = _search_branch(n, refine, verify, path[lev], w, lev, bases, digests, leaf)
                if perm is not None:
                    gens.append(perm)
                    uf.absorb(perm)
            root = uf.find(base)
            order *= sum(1 for v in cells[lev].tolist() if uf.find(v) == root)
    except _BudgetExhausted:
        truncated, order = True, None
    return AutomorphismSet(n, tuple(gens), source="search", nodes=refine.nodes,
                           truncated=truncated, group_order=order, base=tuple(bases))


def _search_branch(n, refine, verify, parent, w, lev, bases, digests, leaf):
    """Find a symmetry fixing ``bases[:lev]`` and sending ``bases[lev]`` to ``w``."""
    stack = [(parent, lev, iter([w]))]
    while stack:
        colors, depth, children = stack[-1]
        child = next(children, None)
        if child is None:
            stack.pop()
            continue
        sub, k, dig = refine(_individualize(colors, child))
        if dig != digests[depth + 1]:
            continue
        if k < n:
            stack.append((sub, depth + 1, iter(_target_cell(sub).tolist())))
            continue
        # leaf colors are ranks 0..n-1; match vertices of equal color
        lab = np.empty(n, dtype=np.int64)
        lab[sub] = np.arange(n)
        perm = lab[leaf]
        if perm[bases[lev]] != w or any(perm[b] != b for b in bases[:lev]):
            continue
        if verify(perm):
            return perm
    return None


@dataclass(frozen=True, eq=False)
class TransitivityVerdict:
    """Certificate (single orbit) or refutation of vertex-transitivity."""

    transitive: bool
    reason: str
    automorphisms: AutomorphismSet | None
    orbits: tuple[tuple[int, ...], ...] = ()
    separated: tuple[int, int] | None = None

    def __bool__(self):
        return self.transitive


def is_vertex_transitive(g: Graph, auts: AutomorphismSet | None = None) -> TransitivityVerdict:
    """Certify or refute vertex-transitivity of ``g``.

    A single orbit certifies, even from a truncated search. Refutation comes
    from a complete search with two or more orbits, or from color refinement
    splitting the vertices. Raises :class:`Inconclusive` otherwise.
    """
    if auts is None:
        auts = g.automorphisms if g.automorphisms is not None else automorphism_search(g)
    if auts.n != g.n:
        raise ValueError("automorphism set does not match the graph")
    if auts.is_transitive:
        return TransitivityVerdict(True, f"single orbit under {len(auts.generators)} generators ({auts.source})",
                                   auts, auts.orbits)
    part = refine_colors(g)
    if part.num_classes > 1:
        u = int(np.flatnonzero(part.colors == 0)[0])
        v = int(np.flatnonzero(part.colors == 1)[0])
        deg = g.degrees
        why = "degree" if deg[u] != deg[v] else "equitable color refinement"
        return TransitivityVerdict(False, f"{why} separates vertices {u} and {v}", auts, auts.orbits, (u, v))
    if not auts.truncated and auts.source == "search":
        return TransitivityVerdict(False, f"{auts.num_orbits} orbits under the full automorphism group",
                                   auts, auts.orbits)
    raise Inconclusive("automorphism evidence is incomplete and no invariant separates the vertices")


def homogeneity_verdict(X: FiniteMetricSpace, auts: AutomorphismSet | None = None) -> TransitivityVerdict:
    """Certify or refute transitivity of the isometry group of ``X``."""
    if auts is None:
        auts = isometry_search(X)
    if auts.is_transitive:
        return TransitivityVerdict(True, f"single orbit under {len(auts.generators)} isometries ({auts.source})",
                                   auts, auts.orbits)
    if not auts.truncated and auts.source == "search":
        return TransitivityVerdict(False, f"{auts.num_orbits} orbits under the full isometry group",
                                   auts, auts.orbits)
    raise Inconclusive("isometry evidence is incomplete")


def orbit_of(v: int, auts: AutomorphismSet) -> tuple[int, ...]:
    return auts.orbit_of(v)


def find_mapping_automorphism(x: int, y: int, g: Graph, auts: AutomorphismSet) -> np.ndarray | None:
    """Explicit automorphism taking ``x`` to ``y``, composed from orbit witness words."""
    perm = auts.mapping(x, y)
    if perm is None:
        return None
    assert perm[x] == y and is_automorphism(g, perm)
    return perm
