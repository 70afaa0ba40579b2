"""Graph families, shortest-path metrics and the single-BFS distribution.

Graphs are immutable CSR structures (``indptr``, ``indices``) with sorted,
duplicate-free neighbor lists. Generators that produce Cayley graphs attach
their left translations as a construction certificate of vertex-transitivity.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix

from .errors import (
    BadParameter,
    ContainsIdentity,
    Disconnected,
    GraphError,
    NoCertificate,
    NotAutomorphism,
    NotSymmetricConnectionSet,
    TooLarge,
)
from .groups import AutomorphismSet
from .metric import DistanceDistribution, FiniteMetricSpace

# n x n distance matrices beyond this are refused
MAX_MATRIX_VERTICES = 2**14
MAX_GRAPH_VERTICES = 2**26
UNREACHABLE = -1


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    indptr: np.ndarray
    indices: np.ndarray
    name: str = ""
    automorphisms: AutomorphismSet | None = field(default=None, repr=False)

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        n = indptr.size - 1
        if n < 0 or indptr[0] != 0 or indptr[-1] != indices.size or (np.diff(indptr) < 0).any():
            raise GraphError("malformed CSR structure")
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise GraphError("neighbor index out of range")
        src = np.repeat(np.arange(n), np.diff(indptr))
        if (src == indices).any():
            raise GraphError("self-loop")
        # sorted and duplicate-free within each row
        same_row = src[1:] == src[:-1]
        if (same_row & (indices[1:] <= indices[:-1])).any():
            raise GraphError("neighbor lists must be sorted and duplicate-free")
        fwd = src * n + indices
        if not np.array_equal(np.sort(indices * n + src), fwd):
            raise GraphError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges, name: str = "", automorphisms=None) -> "Graph":
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise GraphError("edge endpoint out of range")
        if (e[:, 0] == e[:, 1]).any():
            raise GraphError("self-loop")
        both = np.concatenate([e, e[:, ::-1]])
        keys = np.unique(both[:, 0] * n + both[:, 1])
        src, dst = keys // n, keys % n
        indptr = np.concatenate(([0], np.cumsum(np.bincount(src, minlength=n))))
        return cls(indptr, dst, name, automorphisms)

    @classmethod
    def _regular(cls, nbrs: np.ndarray, name: str, automorphisms=None) -> "Graph":
        nbrs = np.sort(nbrs, axis=1)
        n, k = nbrs.shape
        return cls(np.arange(n + 1, dtype=np.int64) * k, nbrs.ravel(), name, automorphisms)

    @property
    def n(self) -> int:
        return self.indptr.size - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return self.indices.size // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in lexicographic order."""
        src = np.repeat(np.arange(self.n), self.degrees)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        src = np.repeat(np.arange(self.n), self.degrees)
        a[src, self.indices] = True
        return a

    def to_scipy(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def connected(self) -> bool:
        return self.n == 0 or bool((bfs_distances(self, 0) != UNREACHABLE).all())


def is_automorphism(g: Graph, perm) -> bool:
    """Edge-by-edge check that ``perm`` maps the edge set onto itself."""
    p = np.asarray(perm, dtype=np.int64)
    n = g.n
    if p.size != n or not np.array_equal(np.sort(p), np.arange(n)):
        return False
    if not np.array_equal(g.degrees[p], g.degrees):
        return False
    deg = g.degrees
    if n and (deg == deg[0]).all():
        k = int(deg[0])
        # image of row u must equal the row of p[u]
        mapped = np.sort(p[g.indices].reshape(n, k), axis=1)
        return bool(np.array_equal(mapped, g.indices.reshape(n, k)[p]))
    src = np.repeat(np.arange(n), deg)
    return bool(np.array_equal(np.sort(p[src] * n + p[g.indices]), src * n + g.indices))


def _certificate(g: Graph, gens, note: str) -> AutomorphismSet:
    for perm in gens:
        if not is_automorphism(g, perm):
            raise NotAutomorphism(f"{note}: generator does not preserve adjacency")
    return AutomorphismSet(g.n, tuple(gens), source=f"construction: {note}")


def _with_certificate(g: Graph, gens, note: str) -> Graph:
    return Graph(g.indptr, g.indices, g.name, _certificate(g, gens, note))


def hypercube(d: int) -> Graph:
    """``Q_d`` on bit patterns ``0..2^d-1``; edges join patterns one bit apart."""
    if not 1 <= d <= 30:
        raise BadParameter("hypercube dimension must be in 1..30")
    if 2**d > MAX_GRAPH_VERTICES:
        raise TooLarge(f"Q_{d} has {2**d} vertices, cap is {MAX_GRAPH_VERTICES}")
    v = np.arange(2**d, dtype=np.int64)
    bits = np.int64(1) << np.arange(d, dtype=np.int64)
    g = Graph._regular(v[:, None] ^ bits[None, :], f"hypercube(d={d})")
    flips = [v ^ b for b in bits]
    return _with_certificate(g, flips, f"left translations of (Z_2)^{d}")


@dataclass(frozen=True)
class AbelianCayley:
    """Cayley graph of ``Z_m1 x ... x Z_mr`` with connection set ``connection``.

    Elements are tuples of residues; for a single modulus plain ints work too.
    """

    moduli: tuple[int, ...]
    connection: tuple[tuple[int, ...], ...]

    def __init__(self, moduli, connection):
        moduli = tuple(int(m) for m in moduli)
        conn = tuple(tuple(int(c) for c in (s if isinstance(s, Sequence) else (s,))) for s in connection)
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "connection", conn)


@dataclass(frozen=True)
class PermutationCayley:
    """Cayley graph of the symmetric group ``S_k``.

    Vertices are permutations of ``0..k-1`` ranked lexicographically; ``x`` and
    ``y`` are adjacent when ``y = x o s`` for some ``s`` in ``connection``.
    """

    degree: int
    connection: tuple[tuple[int, ...], ...]

    def __init__(self, degree, connection):
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "connection", tuple(tuple(int(c) for c in s) for s in connection))


CayleySpec = Union[AbelianCayley, PermutationCayley]


def _abelian(spec: AbelianCayley, name: str | None = None) -> Graph:
    moduli = spec.moduli
    if not moduli or any(m < 1 for m in moduli):
        raise BadParameter("moduli must be positive integers")
    n = math.prod(moduli)
    if n > MAX_GRAPH_VERTICES:
        raise TooLarge(f"group of order {n} exceeds cap {MAX_GRAPH_VERTICES}")
    mods = np.array(moduli, dtype=np.int64)
    conn = []
    for s in spec.connection:
        if len(s) != len(moduli):
            raise BadParameter(f"element {s} does not match moduli {moduli}")
        conn.append(tuple(int(c) % m for c, m in zip(s, moduli)))
    conn_set = set(conn)
    if len(conn_set) != len(conn):
        raise BadParameter("connection set has repeated elements")
    if any(all(c == 0 for c in s) for s in conn_set):
        raise ContainsIdentity("identity in connection set")
    for s in conn_set:
        if tuple((-c) % m for c, m in zip(s, moduli)) not in conn_set:
            raise NotSymmetricConnectionSet(f"inverse of {s} missing")
    coords = np.stack(np.unravel_index(np.arange(n), moduli), axis=1)

    def translate(delta):
        return np.ravel_multi_index(tuple(((coords + delta) % mods).T), moduli)

    nbrs = np.stack([translate(np.array(s)) for s in sorted(conn_set)], axis=1) if conn_set \
        else np.empty((n, 0), dtype=np.int64)
    label = name or f"cayley-abelian(moduli={list(moduli)}, |S|={len(conn_set)})"
    g = Graph._regular(nbrs, label)
    gens = [translate(np.eye(len(moduli), dtype=np.int64)[i]) for i in range(len(moduli)) if moduli[i] > 1]
    g = _with_certificate(g, gens, f"left translations of Z_{'x Z_'.join(map(str, moduli))}")
    if not g.connected:
        warnings.warn(f"{label}: connection set does not generate the group; graph is disconnected",
                      stacklevel=3)
    return g


def _lehmer_rank(perms: np.ndarray) -> np.ndarray:
    m, k = perms.shape
    rank = np.zeros(m, dtype=np.int64)
    for i in range(k):
        smaller = (perms[:, i + 1:] < perms[:, i:i + 1]).sum(axis=1)
        rank += smaller * math.factorial(k - 1 - i)
    return rank


def _symmetric_group(spec: PermutationCayley) -> Graph:
    k = spec.degree
    if k < 1:
        raise BadParameter("degree must be positive")
    if math.factorial(k) > MAX_GRAPH_VERTICES:
        raise TooLarge(f"S_{k} exceeds cap {MAX_GRAPH_VERTICES}")
    ident = tuple(range(k))
    conn = set()
    for s in spec.connection:
        if sorted(s) != list(ident):
            raise BadParameter(f"{s} is not a permutation of 0..{k - 1}")
        conn.add(s)
    if len(conn) != len(spec.connection):
        raise BadParameter("connection set has repeated elements")
    if ident in conn:
        raise ContainsIdentity("identity in connection set")
    for s in conn:
        inv = [0] * k
        for i, si in enumerate(s):
            inv[si] = i
        if tuple(inv) not in conn:
            raise NotSymmetricConnectionSet(f"inverse of {s} missing")
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    # right multiplication x -> x o s
    nbrs = np.stack([_lehmer_rank(perms[:, list(s)]) for s in sorted(conn)], axis=1) if conn \
        else np.empty((perms.shape[0], 0), dtype=np.int64)
    label = f"cayley-perm(degree={k}, |S|={len(conn)})"
    g = Graph._regular(nbrs, label)
    # left multiplication x -> h o x by a transposition and a k-cycle generates S_k
    hs = []
    if k >= 2:
        hs.append(np.array([1, 0] + list(range(2, k))))
    if k >= 3:
        hs.append(np.roll(np.arange(k), -1))
    gens = [_lehmer_rank(h[perms]) for h in hs]
    g = _with_certificate(g, gens, f"left translations of S_{k}")
    if not g.connected:
        warnings.warn(f"{label}: connection set does not generate S_{k}; graph is disconnected",
                      stacklevel=3)
    return g


def cayley(spec: CayleySpec) -> Graph:
    """Build a Cayley graph; its left translations certify vertex-transitivity.

    A connection set that fails to generate the group still yields a graph,
    with ``connected`` false and a warning.
    """
    if isinstance(spec, AbelianCayley):
        return _abelian(spec)
    if isinstance(spec, PermutationCayley):
        return _symmetric_group(spec)
    raise TypeError(f"unsupported Cayley spec {type(spec).__name__}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise BadParameter("cycle needs n >= 3")
    return _abelian(AbelianCayley([n], [1, n - 1]), f"cycle(n={n})")


def complete(n: int) -> Graph:
    if n < 2:
        raise BadParameter("complete graph needs n >= 2")
    return _abelian(AbelianCayley([n], range(1, n)), f"complete(n={n})")


def petersen() -> Graph:
    # outer 5-cycle 0..4, spokes i -- i+5, inner pentagram 5..9
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, edges, "petersen")


def path(n: int) -> Graph:
    if n < 1:
        raise BadParameter("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"path(n={n})")


def star(leaves: int) -> Graph:
    if leaves < 1:
        raise BadParameter("star needs at least one leaf")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], f"star(leaves={leaves})")


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Unweighted distances from ``source``; unreachable vertices get ``UNREACHABLE``."""
    n = g.n
    if not 0 <= source < n:
        raise BadParameter(f"source {source} out of range")
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    deg = g.degrees
    level = 0
    while frontier.size:
        level += 1
        lens = deg[frontier]
        total = int(lens.sum())
        if total == 0:
            break
        # gather all neighbor slots of the frontier in one shot
        starts = g.indptr[frontier]
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
        nbrs = g.indices[offs]
        nbrs = nbrs[dist[nbrs] == UNREACHABLE]
        frontier = np.unique(nbrs)
        dist[frontier] = level
    return dist


def _source_blocks(g: Graph):
    # 64-source words per block, bounded so a gathered block stays small
    n = g.n
    words = -(-n // 64)
    step = max(1, min(words, (1 << 22) // max(n, 1)))
    for lo in range(0, words, step):
        yield lo * 64, min(n, (lo + step) * 64)


def _neighbor_table(g: Graph) -> np.ndarray:
    """``(n, max_degree)`` neighbor table padded with the sentinel row ``n``."""
    n, deg = g.n, g.degrees
    width = int(deg.max()) if n else 0
    table = np.full((n, width), n, dtype=np.int64)
    src = np.repeat(np.arange(n), deg)
    table[src, np.arange(src.size) - g.indptr[src]] = g.indices
    return table


def _expand(table: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Row ``v`` of the result is the OR of the rows of ``v``'s neighbors."""
    padded = np.vstack([bits, np.zeros((1, bits.shape[1]), dtype=bits.dtype)])
    out = padded[table[:, 0]]
    for j in range(1, table.shape[1]):
        out |= padded[table[:, j]]
    return out


def _pack(mask: np.ndarray) -> np.ndarray:
    # little-endian bit order so that bit s of a row is column s
    packed = np.packbits(mask, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.hstack([packed, np.zeros((mask.shape[0], pad), dtype=np.uint8)])
    return np.ascontiguousarray(packed).view("<u8")


def _unpack(bits: np.ndarray, count: int) -> np.ndarray:
    return np.unpackbits(bits.view(np.uint8), axis=1, count=count, bitorder="little")


def _identity_block(n: int, s_lo: int, s_hi: int) -> np.ndarray:
    return _pack(np.arange(n)[:, None] == np.arange(s_lo, s_hi)[None, :])


def _packed_apsp(g: Graph) -> np.ndarray:
    """All-sources BFS on packed bitsets; ``dist[v, s]`` as int32.

    Row ``v`` of the visited array holds one bit per source ``s`` already
    reaching ``v``. One frontier step is an OR over neighbor rows, so a block
    of sources advances together.
    """
    n = g.n
    dist = np.zeros((n, n), dtype=np.int32)
    if n == 1:
        return dist
    table = _neighbor_table(g)
    for s_lo, s_hi in _source_blocks(g):
        ns = s_hi - s_lo
        seen = _identity_block(n, s_lo, s_hi)
        frontier = seen.copy()
        block = dist[:, s_lo:s_hi]
        while frontier.any():
            # d(v, s) counts the levels at which s has not yet reached v
            block += _unpack(~seen, ns)
            frontier = _expand(table, frontier) & ~seen
            seen |= frontier
    return dist


def _assert_graph_metric(g: Graph, dist: np.ndarray) -> None:
    """Check that ``dist`` is exactly the path metric of ``g``.

    With ``L_k`` the pairs at distance at most ``k``, the path metric is the
    unique matrix with ``L_0`` the diagonal and ``L_{k+1} = L_k | N(L_k)``.
    Equality with the path metric implies the triangle inequality.
    """
    n = g.n
    assert (np.diagonal(dist) == 0).all(), "nonzero diagonal"
    if n == 1:
        return
    table = _neighbor_table(g)
    top = int(dist.max())
    for s_lo, s_hi in _source_blocks(g):
        block = dist[:, s_lo:s_hi]
        level = _pack(block <= 0)
        assert np.array_equal(level, _identity_block(n, s_lo, s_hi)), "zero distance off the diagonal"
        for k in range(top):
            nxt = _pack(block <= k + 1)
            assert np.array_equal(nxt, level | _expand(table, level)), f"level {k + 1} is not a BFS layer"
            level = nxt


def apsp_metric(g: Graph) -> FiniteMetricSpace:
    """All-pairs shortest-path metric with the uniform measure."""
    n = g.n
    if n > MAX_MATRIX_VERTICES:
        raise TooLarge(f"{n} vertices exceeds the distance-matrix cap {MAX_MATRIX_VERTICES}")
    d0 = bfs_distances(g, 0)
    if (d0 == UNREACHABLE).any():
        raise Disconnected(np.flatnonzero(d0 != UNREACHABLE).tolist())
    dist = _packed_apsp(g)
    _assert_graph_metric(g, dist)
    return FiniteMetricSpace.trusted(dist)


def _transitive_evidence(g: Graph, certificate) -> AutomorphismSet:
    if certificate is None:
        certificate = g.automorphisms
    auts = getattr(certificate, "automorphisms", certificate)
    if getattr(certificate, "transitive", True) is False or auts is None:
        raise NoCertificate(f"{g.name or 'graph'}: no vertex-transitivity certificate")
    if not auts.is_transitive:
        raise NoCertificate("supplied automorphisms do not act transitively")
    return auts


def transitive_distribution(g: Graph, certificate=None) -> DistanceDistribution:
    """Distance distribution of a vertex-transitive graph from a single BFS.

    Every vertex has the same distance profile, so the counts from vertex 0
    divided by ``n`` give the exact ordered-pair masses. ``certificate`` may
    be an :class:`AutomorphismSet` or a transitivity verdict; it defaults to
    the graph's construction certificate.
    """
    _transitive_evidence(g, certificate)
    d = bfs_distances(g, 0)
    if (d == UNREACHABLE).any():
        raise Disconnected(np.flatnonzero(d != UNREACHABLE).tolist())
    counts = np.bincount(d)
    return DistanceDistribution(tuple((Fraction(v), Fraction(int(c), g.n))
                                      for v, c in enumerate(counts) if c))
