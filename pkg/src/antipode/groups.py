"""Permutation groups given by generators: orbits and explicit witnesses.

Permutations are 1-D integer arrays ``p`` with ``p[i]`` the image of ``i``.
Composition follows function notation, ``compose(a, b)[i] == a[b[i]]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch


def as_permutation(p, n: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=np.intp)
    if arr.ndim != 1:
        raise ValueError("permutation must be one-dimensional")
    if n is not None and arr.size != n:
        raise DimensionMismatch(f"permutation of length {arr.size}, expected {n}")
    if not np.array_equal(np.sort(arr), np.arange(arr.size)):
        raise ValueError("not a permutation of 0..n-1")
    return arr


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.intp)


def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a o b`` (apply ``b`` first)."""
    return a[b]


def inverse(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size, dtype=p.dtype)
    return inv


def format_permutation(p) -> str:
    """One-line image form ``"p(0) p(1) ... p(n-1)"``."""
    return " ".join(str(int(x)) for x in p)


def parse_permutation(text: str) -> np.ndarray:
    return as_permutation([int(tok) for tok in text.split()])


@dataclass(frozen=True, eq=False)
class AutomorphismSet:
    """Generators of a permutation group acting on ``range(n)``.

    ``source`` says where the generators came from (``"search"`` or a
    ``"construction: ..."`` note). ``group_order`` is only known for complete
    searches. Orbits and the Schreier trees behind :meth:`mapping` are built
    lazily on first use.
    """

    n: int
    generators: tuple[np.ndarray, ...]
    source: str = "search"
    nodes: int = 0
    truncated: bool = False
    group_order: int | None = None
    base: tuple[int, ...] = field(default=())

    def __post_init__(self):
        gens = tuple(as_permutation(g, self.n) for g in self.generators)
        object.__setattr__(self, "generators", gens)

    @cached_property
    def _schreier(self):
        # breadth-first orbit closure; parent/via record one generator word per point
        n = self.n
        orbit_id = np.full(n, -1, dtype=np.intp)
        parent = np.full(n, -1, dtype=np.intp)
        via = np.full(n, -1, dtype=np.intp)
        roots = []
        for root in range(n):
            if orbit_id[root] != -1:
                continue
            oid = len(roots)
            roots.append(root)
            orbit_id[root] = oid
            frontier = np.array([root], dtype=np.intp)
            while frontier.size:
                nxt = []
                for gi, g in enumerate(self.generators):
                    img = g[frontier]
                    fresh = orbit_id[img] == -1
                    if not fresh.any():
                        continue
                    img, src = img[fresh], frontier[fresh]
                    img, first = np.unique(img, return_index=True)
                    orbit_id[img] = oid
                    parent[img] = src[first]
                    via[img] = gi
                    nxt.append(img)
                frontier = np.concatenate(nxt) if nxt else np.empty(0, dtype=np.intp)
        return orbit_id, parent, via, tuple(roots)

    @property
    def orbit_ids(self) -> np.ndarray:
        """Orbit index of each point; orbits are numbered by their smallest member."""
        return self._schreier[0]

    @cached_property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        ids = self.orbit_ids
        order = np.argsort(ids, kind="stable")
        bounds = np.flatnonzero(np.diff(ids[order])) + 1
        return tuple(tuple(int(v) for v in chunk) for chunk in np.split(order, bounds))

    @property
    def num_orbits(self) -> int:
        return len(self._schreier[3])

    @property
    def is_transitive(self) -> bool:
        return self.n > 0 and self.num_orbits == 1

    def orbit_of(self, v: int) -> tuple[int, ...]:
        return self.orbits[int(self.orbit_ids[v])]

    def word(self, v: int) -> list[int]:
        """Generator indices ``[g1, ..., gL]`` with ``v = gL(...g1(root))``."""
        _, parent, via, _ = self._schreier
        out = []
        while parent[v] != -1:
            out.append(int(via[v]))
            v = int(parent[v])
        out.reverse()
        return out

    def word_permutation(self, v: int) -> np.ndarray:
        p = identity(self.n)
        for gi in self.word(v):
            p = compose(self.generators[gi], p)
        return p

    def mapping(self, x: int, y: int) -> np.ndarray | None:
        """A group element taking ``x`` to ``y``, or ``None`` if they lie in different orbits."""
        ids = self.orbit_ids
        if ids[x] != ids[y]:
            return None
        p = compose(self.word_permutation(y), inverse(self.word_permutation(x)))
        assert p[x] == y
        return p


def closure_order(generators: Sequence[np.ndarray], n: int, limit: int = 10**6) -> int:
    """Order of the generated group by explicit enumeration (small groups only)."""
    start = identity(n)
    seen = {start.tobytes()}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = compose(g, p)
                key = q.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(q)
                    if len(seen) > limit:
                        raise OverflowError("group larger than enumeration limit")
        frontier = nxt
    return len(seen)
