"""Exact analysis of finite metric spaces.

Distances are stored as an integer matrix over one common denominator, so
every sum, comparison and tightness test is exact. Weights (the probability
measure on the points) are kept as :class:`fractions.Fraction`.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    Asymmetric,
    BadWeights,
    CoincidentPoints,
    DegenerateSpace,
    DimensionMismatch,
    EvidenceRequired,
    InconsistentWithBound,
    NegativeDistance,
    NonzeroDiagonal,
    NotIsometry,
    NotUniquelyAntipodal,
    OffDiagonalUndefined,
    TriangleViolation,
)
from .groups import AutomorphismSet, as_permutation

_INT64_SAFE = 2**62
# cells per block when scanning n x n slabs
_BLOCK = 1 << 22
# strictness failures kept as explicit witnesses; the count is always exact
MAX_WITNESSES = 100


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        # floats are taken at face value through their decimal repr
        return Fraction(repr(float(x)))
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    return Fraction(x)


def _int_array(values: np.ndarray) -> np.ndarray:
    """Pack Python ints into int64 when they fit, else keep an object array."""
    flat = values.ravel()
    if flat.size == 0:
        return np.zeros(values.shape, dtype=np.int64)
    lo, hi = min(flat), max(flat)
    if -(2**62) < lo and hi < 2**62:
        return np.array(values, dtype=np.int64)
    return np.array(values, dtype=object)


def _exact_sum(a: np.ndarray, power: int = 1) -> int:
    """Exact integer sum of ``a**power`` for int arrays of any dtype."""
    if a.size == 0:
        return 0
    if a.dtype != object:
        peak = int(np.max(np.abs(a)))
        if peak**power * a.size < _INT64_SAFE:
            b = a.astype(np.int64, copy=False)
            return int(np.sum(b**power if power != 1 else b, dtype=np.int64))
        a = a.astype(object)
    return int(sum(int(x) for x in np.sum(a**power, axis=-1).ravel()))


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space with a probability measure.

    The distance between points ``i`` and ``j`` is ``numer[i, j] / denom``.
    Build instances with :func:`validate_metric`; generators that guarantee
    the axioms by construction use :meth:`trusted`.
    """

    numer: np.ndarray
    denom: int
    weights: tuple[Fraction, ...]

    @classmethod
    def trusted(cls, numer, denom: int = 1, weights=None) -> "FiniteMetricSpace":
        numer = np.asarray(numer)
        n = numer.shape[0]
        if weights is None:
            weights = (Fraction(1, n),) * n if n else ()
        return cls(numer, int(denom), tuple(weights))

    @property
    def n(self) -> int:
        return int(self.numer.shape[0])

    @property
    def uniform(self) -> bool:
        return len(set(self.weights)) <= 1

    def distance(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.numer[i, j]), self.denom)

    def to_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(int(v), self.denom) for v in row] for row in self.numer]

    @property
    def _weight_ints(self) -> tuple[np.ndarray, int]:
        # weights as integers over a common denominator
        den = math.lcm(*(w.denominator for w in self.weights)) if self.weights else 1
        return np.array([int(w * den) for w in self.weights], dtype=object), den


def validate_metric(matrix, weights: Sequence | None = None, *, check_triangle: bool = True) -> FiniteMetricSpace:
    """Check the metric axioms exhaustively and return the validated space.

    Entries may be ints, :class:`~fractions.Fraction`, or strings such as
    ``"3/4"``. Omitted weights default to the uniform measure. The triangle
    check is O(n^3) and reports the lexicographically first failing triple.
    """
    if isinstance(matrix, np.ndarray) and matrix.dtype.kind in "iu":
        rows = matrix
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise DimensionMismatch("distance matrix must be square")
        numer, denom = rows.astype(np.int64), 1
    else:
        rows = [[_as_fraction(x) for x in row] for row in matrix]
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DimensionMismatch("distance matrix must be square")
        denom = math.lcm(*(x.denominator for row in rows for x in row)) if n else 1
        numer = _int_array(np.array([[int(x * denom) for x in row] for row in rows], dtype=object).reshape(n, n))
    n = numer.shape[0]

    diag = np.flatnonzero(np.diagonal(numer) != 0)
    if diag.size:
        raise NonzeroDiagonal(int(diag[0]))
    neg = np.argwhere(numer < 0)
    if neg.size:
        raise NegativeDistance(*map(int, neg[0]))
    asym = np.argwhere(numer != numer.T)
    if asym.size:
        raise Asymmetric(*map(int, asym[0]))
    zero = np.argwhere((numer == 0) & ~np.eye(n, dtype=bool))
    if zero.size:
        raise CoincidentPoints(*map(int, zero[0]))
    if check_triangle:
        witness = triangle_violation(numer)
        if witness is not None:
            raise TriangleViolation(*witness)

    if weights is None:
        w = (Fraction(1, n),) * n
    else:
        if len(weights) != n:
            raise DimensionMismatch(f"{len(weights)} weights for {n} points")
        w = tuple(_as_fraction(x) for x in weights)
        if any(x <= 0 for x in w):
            raise BadWeights("weights must be positive")
        if sum(w) != 1:
            raise BadWeights(f"weights sum to {sum(w)}, not 1")
    return FiniteMetricSpace(numer, denom, w)


def triangle_violation(numer: np.ndarray) -> tuple[int, int, int] | None:
    """Lexicographically first ``(i, j, k)`` with ``d(i,j) > d(i,k) + d(k,j)``."""
    n = numer.shape[0]
    for i in range(n):
        # via[k, j] = d(i,k) + d(k,j)
        via = numer[i][:, None] + numer
        bad = numer[i][None, :] > via
        if bad.any():
            cols = np.flatnonzero(bad.any(axis=0))
            j = int(cols[0])
            k = int(np.flatnonzero(bad[:, j])[0])
            return i, j, k
    return None


def is_ultrametric(X: FiniteMetricSpace) -> bool:
    """Exhaustive check of ``d(x,z) <= max(d(x,y), d(y,z))``."""
    a = X.numer
    for i in range(X.n):
        if (a[i][None, :] > np.maximum(a[i][:, None], a)).any():
            return False
    return True


def diameter(X: FiniteMetricSpace) -> Fraction:
    if X.n == 0:
        return Fraction(0)
    return Fraction(int(X.numer.max()), X.denom)


def diagonal_mass(X: FiniteMetricSpace) -> Fraction:
    """``(m x m)`` measure of the diagonal, i.e. the sum of squared weights."""
    return sum((w * w for w in X.weights), Fraction(0))


def mu(X: FiniteMetricSpace) -> Fraction:
    return 1 - diagonal_mass(X)


def _weighted_total(X: FiniteMetricSpace, power: int) -> Fraction:
    # sum_{x,y} m(x) m(y) d(x,y)^power
    if X.uniform:
        return Fraction(_exact_sum(X.numer, power), X.n * X.n * X.denom**power)
    wn, wden = X._weight_ints
    a = X.numer.astype(object) ** power
    total = int(wn @ a @ wn)
    return Fraction(total, wden * wden * X.denom**power)


class AverageMode(enum.Enum):
    WITH_DIAGONAL = "with_diagonal"
    OFF_DIAGONAL = "off_diagonal"


def average_distance(X: FiniteMetricSpace, mode: AverageMode | str = AverageMode.WITH_DIAGONAL) -> Fraction:
    """``A`` (diagonal included) or ``A_bar = A / mu`` (diagonal excluded)."""
    mode = AverageMode(mode)
    A = _weighted_total(X, 1)
    if mode is AverageMode.WITH_DIAGONAL:
        return A
    if X.n < 2:
        raise OffDiagonalUndefined("off-diagonal average needs at least two points")
    return A / mu(X)


@dataclass(frozen=True)
class DistanceDistribution:
    """Law of ``d(x, y)`` for ``(x, y)`` drawn from ``m x m``."""

    entries: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        values = [v for v, _ in self.entries]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("distance values must be strictly increasing")
        if sum(m for _, m in self.entries) != 1:
            raise ValueError("masses must sum to 1")

    @classmethod
    def from_counts(cls, counts: dict, total: int, denom: int = 1) -> "DistanceDistribution":
        return cls(tuple((Fraction(int(v), denom), Fraction(int(c), total))
                         for v, c in sorted(counts.items()) if c))

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for v, _ in self.entries)

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(m for _, m in self.entries)

    def as_dict(self) -> dict[Fraction, Fraction]:
        return dict(self.entries)

    def mass(self, value) -> Fraction:
        return self.as_dict().get(_as_fraction(value), Fraction(0))

    def cdf(self, a) -> Fraction:
        """``Pr(d <= a)``."""
        a = _as_fraction(a)
        return sum((m for v, m in self.entries if v <= a), Fraction(0))

    def tail(self, a) -> Fraction:
        """``Pr(d >= a)``."""
        a = _as_fraction(a)
        return sum((m for v, m in self.entries if v >= a), Fraction(0))

    @property
    def max_value(self) -> Fraction:
        return self.entries[-1][0]

    def moment(self, power: int = 1) -> Fraction:
        return sum((v**power * m for v, m in self.entries), Fraction(0))


def distance_distribution(X: FiniteMetricSpace) -> DistanceDistribution:
    a = X.numer
    if X.uniform:
        flat = a.ravel()
        if flat.dtype != object and int(flat.max()) < 1 << 24:
            counts = np.bincount(flat.astype(np.int64))
            nz = np.flatnonzero(counts)
            table = dict(zip(nz.tolist(), counts[nz].tolist()))
        else:
            vals, counts = np.unique(flat, return_counts=True)
            table = dict(zip((int(v) for v in vals), counts.tolist()))
        return DistanceDistribution.from_counts(table, X.n * X.n, X.denom)
    wn, wden = X._weight_ints
    entries = []
    for v in np.unique(a):
        mask = (a == v).astype(object)
        entries.append((Fraction(int(v), X.denom), Fraction(int(wn @ mask @ wn), wden * wden)))
    return DistanceDistribution(tuple(entries))


@dataclass(frozen=True)
class BoundsReport:
    """Diameter, averages and the two-sided bounds, all exact."""

    n: int
    D: Fraction
    A: Fraction
    A_bar: Fraction | None
    mu: Fraction
    E_d2: Fraction
    lower_ok: bool
    upper_ok: bool
    sq_lower_ok: bool
    sq_upper_ok: bool
    lower_tight: bool
    upper_tight: bool

    @property
    def lower_slack(self) -> Fraction:
        return self.A - self.D / 2

    @property
    def upper_slack(self) -> Fraction:
        return self.mu * self.D - self.A

    @property
    def sq_lower_slack(self) -> Fraction:
        return self.E_d2 - self.D**2 / 8

    @property
    def sq_upper_slack(self) -> Fraction:
        return self.D**2 - self.E_d2


def bounds_from_distribution(dist: DistanceDistribution, mu_value: Fraction, n: int) -> BoundsReport:
    D = dist.max_value
    A = dist.moment(1)
    E2 = dist.moment(2)
    return BoundsReport(
        n=n, D=D, A=A,
        A_bar=A / mu_value if mu_value > 0 else None,
        mu=mu_value, E_d2=E2,
        lower_ok=D / 2 <= A,
        upper_ok=A <= mu_value * D,
        sq_lower_ok=D**2 / 8 <= E2,
        sq_upper_ok=E2 <= D**2,
        lower_tight=A == D / 2,
        upper_tight=A == mu_value * D,
    )


def check_bounds(X: FiniteMetricSpace) -> BoundsReport:
    """Evaluate ``D/2 <= A <= mu*D`` and ``D^2/8 <= E[d^2] <= D^2``.

    The inequalities are theorems only for homogeneous spaces; on arbitrary
    input the report simply records which ones fail.
    """
    return bounds_from_distribution(distance_distribution(X), mu(X), X.n)


class Tier(enum.IntEnum):
    NOT_ANTIPODAL = 0
    ANTIPODAL = 1
    UNIQUELY_ANTIPODAL = 2
    STRICTLY_ANTIPODAL = 3


@dataclass(frozen=True, eq=False)
class AntipodalityReport:
    tier: Tier
    antipodes: tuple[tuple[int, ...], ...]
    antipodal_map: np.ndarray | None
    witnesses: tuple[tuple[int, int, int], ...]
    violation_count: int
    homogeneity_evidence: str
    unmapped: tuple[int, ...] = ()


def _antipode_pairs(X: FiniteMetricSpace):
    """Row-major ``(x, y)`` index arrays of all pairs at distance ``D``."""
    rows, cols = np.nonzero(X.numer == X.numer.max())
    return rows.astype(np.intp), cols.astype(np.intp)


def _isometry_failure(numer: np.ndarray, p: np.ndarray) -> tuple[int, int] | None:
    n = numer.shape[0]
    step = max(1, _BLOCK // max(n, 1))
    for lo in range(0, n, step):
        bad = numer[p[lo:lo + step]][:, p] != numer[lo:lo + step]
        if bad.any():
            x, y = np.argwhere(bad)[0]
            return int(x) + lo, int(y)
    return None


def classify_antipodality(X: FiniteMetricSpace, evidence: AutomorphismSet | None = None, *,
                          verify_evidence: bool = True,
                          max_witnesses: int = MAX_WITNESSES) -> AntipodalityReport:
    """Place ``X`` on the antipodal / uniquely / strictly antipodal ladder.

    The antipodal tier also demands an isometry taking each point to one of
    its antipodes. That requirement is discharged by ``evidence``: a group of
    isometries in which ``x`` and some antipode share an orbit. Spaces where a
    point has no antipode at all are classified without evidence.

    Triples ``(x, y, O_x)`` breaking strictness are counted exactly; the first
    ``max_witnesses`` of them in row-major order are kept as witnesses.
    """
    n = X.n
    if n < 2:
        raise DegenerateSpace("antipodality needs at least two points")
    if not X.uniform:
        warnings.warn("weights are not uniform; a homogeneous finite space carries only the "
                      "uniform invariant measure", stacklevel=2)
    rows, cols = _antipode_pairs(X)
    counts = np.bincount(rows, minlength=n)
    starts = np.concatenate(([0], np.cumsum(counts)))
    antipodes = tuple(tuple(cols[starts[x]:starts[x + 1]].tolist()) for x in range(n))

    # strictness: D = d(x,y) + d(y,O_x) for every antipode O_x
    top = X.numer.max()
    witnesses, violations = [], 0
    step = max(1, _BLOCK // n)
    for lo in range(0, rows.size, step):
        r, c = rows[lo:lo + step], cols[lo:lo + step]
        bad = X.numer[r] + X.numer[c] != top
        violations += int(bad.sum())
        room = max_witnesses - len(witnesses)
        if room > 0:
            hits = np.argwhere(bad)[:room]
            witnesses += zip(r[hits[:, 0]].tolist(), hits[:, 1].tolist(), c[hits[:, 0]].tolist())

    def report(tier, note, amap=None, unmapped=()):
        return AntipodalityReport(tier, antipodes, amap, tuple(witnesses), violations, note, tuple(unmapped))

    empty = np.flatnonzero(counts == 0)
    if empty.size:
        return report(Tier.NOT_ANTIPODAL, f"not needed: point {int(empty[0])} has no antipode")
    if evidence is None:
        raise EvidenceRequired("an isometry taking each point to an antipode must be exhibited; "
                               "supply an AutomorphismSet")
    if evidence.n != n:
        raise DimensionMismatch(f"evidence acts on {evidence.n} points, space has {n}")
    if verify_evidence:
        for g in evidence.generators:
            bad = _isometry_failure(X.numer, g)
            if bad is not None:
                raise NotIsometry(*bad)
    orbit = evidence.orbit_ids
    hit = np.zeros(n, dtype=bool)
    hit[rows[orbit[rows] == orbit[cols]]] = True
    unmapped = np.flatnonzero(~hit)
    note = f"{evidence.source}: {len(evidence.generators)} generators, {evidence.num_orbits} orbit(s)"
    if unmapped.size:
        if evidence.truncated:
            raise EvidenceRequired(f"truncated automorphism search cannot map point {int(unmapped[0])} "
                                   "to an antipode")
        return report(Tier.NOT_ANTIPODAL, note, unmapped=unmapped.tolist())
    if not (counts == 1).all():
        return report(Tier.ANTIPODAL, note)
    amap = cols.copy()
    tier = Tier.STRICTLY_ANTIPODAL if violations == 0 else Tier.UNIQUELY_ANTIPODAL
    return report(tier, note, amap)


def antipodal_map(X: FiniteMetricSpace) -> np.ndarray:
    """The map sending each point to its unique antipode, checked to be an isometry."""
    if X.n < 2:
        raise DegenerateSpace("antipodal map needs at least two points")
    rows, cols = _antipode_pairs(X)
    counts = np.bincount(rows, minlength=X.n)
    off = np.flatnonzero(counts != 1)
    if off.size:
        raise NotUniquelyAntipodal(int(off[0]), int(counts[off[0]]))
    bad = _isometry_failure(X.numer, cols)
    if bad is not None:
        raise NotIsometry(*bad)
    return cols


@dataclass(frozen=True)
class InvolutionReport:
    is_involution: bool
    fixed_point_free: bool
    is_isometry: bool
    commutes_with_generators: bool
    even_cardinality: bool

    @property
    def all_hold(self) -> bool:
        return all((self.is_involution, self.fixed_point_free, self.is_isometry,
                    self.commutes_with_generators, self.even_cardinality))


def verify_involution_properties(O, X: FiniteMetricSpace, gens) -> InvolutionReport:
    """Check that ``O`` is a fixed-point-free isometric involution central in ``<gens>``.

    Centrality is tested generator by generator, which suffices for the
    generated group.
    """
    n = X.n
    generators = gens.generators if isinstance(gens, AutomorphismSet) else gens
    O = as_permutation(O, n)
    generators = [as_permutation(g, n) for g in generators]
    idx = np.arange(n)
    return InvolutionReport(
        is_involution=bool(np.array_equal(O[O], idx)),
        fixed_point_free=bool((O != idx).all()),
        is_isometry=_isometry_failure(X.numer, O) is None,
        commutes_with_generators=all(np.array_equal(g[O], O[g]) for g in generators),
        even_cardinality=n % 2 == 0,
    )


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    first_violation: Fraction | None = None


def symmetry_check(dist: DistanceDistribution, D) -> SymmetryReport:
    """Exact test of ``mass(v) == mass(D - v)`` for every occurring value ``v``."""
    D = _as_fraction(D)
    if dist.max_value > D:
        raise ValueError("D is smaller than the largest distance")
    table = dist.as_dict()
    for v, m in dist.entries:
        if table.get(D - v, Fraction(0)) != m:
            return SymmetryReport(False, v)
    return SymmetryReport(True)


class ExtremalUpper(NamedTuple):
    is_extremal: bool
    scale: Fraction | None


def detect_extremal_upper(X: FiniteMetricSpace) -> ExtremalUpper:
    """Is ``X`` a scaled discrete metric under the uniform measure?"""
    if X.n == 1:
        return ExtremalUpper(True, Fraction(0))
    off = X.numer[~np.eye(X.n, dtype=bool)]
    first = off[0]
    if (off == first).all() and X.uniform:
        return ExtremalUpper(True, Fraction(int(first), X.denom))
    return ExtremalUpper(False, None)


def detect_extremal_lower(X: FiniteMetricSpace, evidence: AutomorphismSet | None) -> bool:
    """True iff ``X`` is strictly antipodal; cross-checked against ``A == D/2``."""
    strict = classify_antipodality(X, evidence).tier is Tier.STRICTLY_ANTIPODAL
    tight = check_bounds(X).lower_tight
    if evidence is not None and evidence.is_transitive and X.uniform and strict != tight:
        raise InconsistentWithBound(f"strictly antipodal={strict} but A == D/2 is {tight}")
    return strict
