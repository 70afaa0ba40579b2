"""Sampled distance statistics on spheres and flat tori; exact p-adic truncations.

Sampling uses the counter-based Philox generator. The draw is cut into fixed
chunks and chunk ``c`` reads its own stream ``Philox(key=seed).jumped(c)``,
so results depend on the seed alone, never on how chunks are scheduled
across threads. Chunk statistics are merged in chunk order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special, stats

from .errors import BadDimension, BadParameter, NotPrime, TooLarge
from .groups import AutomorphismSet
from .metric import FiniteMetricSpace

CHUNK = 1 << 16
MIN_SAMPLES = 1000
Z99 = float(stats.norm.ppf(0.995))
# false-alarm rate of the chi-square style histogram tests
ALPHA = 1e-4
TORUS_DIAMETER = math.sqrt(2) / 2


def _stream(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk))


@dataclass(frozen=True)
class SampleEstimate:
    mean: float
    std: float
    n: int
    stderr: float
    ci99: tuple[float, float]
    seed: int
    degenerate: int = 0

    def to_json(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n, "seed": self.seed,
                "ci99_lo": self.ci99[0], "ci99_hi": self.ci99[1]}


@dataclass
class _Accumulator:
    # pairwise merge of (count, mean, M2) partial statistics
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    degenerate: int = 0
    hist: np.ndarray | None = None

    def merge(self, part: "_Accumulator") -> None:
        if part.count:
            total = self.count + part.count
            delta = part.mean - self.mean
            self.mean += delta * part.count / total
            self.m2 += part.m2 + delta * delta * self.count * part.count / total
            self.count = total
        self.degenerate += part.degenerate
        if part.hist is not None:
            self.hist = part.hist.copy() if self.hist is None else self.hist + part.hist


def _summarize(x: np.ndarray, edges: np.ndarray | None, degenerate: int) -> _Accumulator:
    m = float(np.mean(x))
    hist = None
    if edges is not None:
        # right edge is closed so the diameter lands in the last bin
        hist = np.histogram(x, bins=edges)[0].astype(np.int64)
    return _Accumulator(x.size, m, float(np.sum((x - m) ** 2)), degenerate, hist)


def _run(draw, N: int, seed: int, edges, threads: int) -> _Accumulator:
    sizes = [min(CHUNK, N - lo) for lo in range(0, N, CHUNK)]

    def job(c):
        x, bad = draw(_stream(seed, c), sizes[c])
        return _summarize(x, edges, bad)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    acc = _Accumulator()
    for part in parts:
        acc.merge(part)
    return acc


def _estimate(acc: _Accumulator, seed: int) -> SampleEstimate:
    std = math.sqrt(acc.m2 / (acc.count - 1))
    se = std / math.sqrt(acc.count)
    return SampleEstimate(acc.mean, std, acc.count, se, (acc.mean - Z99 * se, acc.mean + Z99 * se),
                          seed, acc.degenerate)


def _unit_vectors(rng: np.random.Generator, m: int, dim: int) -> tuple[np.ndarray, int]:
    x = rng.standard_normal((m, dim))
    norms = np.linalg.norm(x, axis=1)
    retries = 0
    while True:
        bad = norms == 0
        if not bad.any():
            return x / norms[:, None], retries
        retries += int(bad.sum())
        x[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms[bad] = np.linalg.norm(x[bad], axis=1)


def sphere_distance(u, v) -> float:
    """Great-circle distance between unit vectors, with the dot product clamped."""
    return float(np.arccos(np.clip(np.dot(u, v), -1.0, 1.0)))


def _sphere_draw(d: int):
    def draw(rng, m):
        u, r1 = _unit_vectors(rng, m, d + 1)
        v, r2 = _unit_vectors(rng, m, d + 1)
        dots = np.einsum("ij,ij->i", u, v)
        return np.arccos(np.clip(dots, -1.0, 1.0)), r1 + r2
    return draw


def _check_sampling(N: int) -> None:
    if N < MIN_SAMPLES:
        raise BadParameter(f"need at least {MIN_SAMPLES} samples")


def sample_sphere_mean_distance(d: int, N: int, seed: int, threads: int = 1) -> SampleEstimate:
    """Monte Carlo mean geodesic distance on the unit sphere ``S^d``."""
    if d < 1:
        raise BadDimension("sphere dimension must be at least 1")
    _check_sampling(N)
    return _estimate(_run(_sphere_draw(d), N, seed, None, threads), seed)


def sphere_distance_cdf(theta, d: int):
    """CDF of the distance between independent uniform points on ``S^d``.

    The cosine of the distance has density proportional to
    ``(1 - t^2)^((d-2)/2)``, so ``(1 - cos(theta)) / 2`` is Beta(d/2, d/2).
    """
    return special.betainc(d / 2, d / 2, (1 - np.cos(theta)) / 2)


@dataclass(frozen=True)
class ChiSquareTest:
    statistic: float
    dof: int
    threshold: float
    passed: bool


def _chi2(statistic: float, dof: int) -> ChiSquareTest:
    threshold = float(stats.chi2.isf(ALPHA, dof))
    return ChiSquareTest(float(statistic), dof, threshold, bool(statistic <= threshold))


def mirror_symmetry_test(counts: np.ndarray) -> ChiSquareTest:
    """Compare bin ``b`` with bin ``bins-1-b``.

    Under symmetry each pair total ``s`` splits Binomial(s, 1/2), so
    ``(c_b - c_mirror)^2 / s`` is asymptotically chi-square with one degree
    of freedom; the discrepancy therefore scales like ``sqrt(N)``.
    """
    half = counts.size // 2
    a, b = counts[:half].astype(float), counts[::-1][:half].astype(float)
    s = a + b
    used = s > 0
    stat = float(np.sum((a[used] - b[used]) ** 2 / s[used]))
    return _chi2(stat, int(used.sum()))


def goodness_of_fit(counts: np.ndarray, probs: np.ndarray) -> ChiSquareTest:
    expected = probs * counts.sum()
    used = expected > 0
    stat = float(np.sum((counts[used] - expected[used]) ** 2 / expected[used]))
    return _chi2(stat, int(used.sum()) - 1)


@dataclass(frozen=True)
class DistanceHistogram:
    edges: np.ndarray
    counts: np.ndarray
    estimate: SampleEstimate
    symmetry: ChiSquareTest
    fit: ChiSquareTest | None = None
    expected: np.ndarray | None = field(default=None, repr=False)

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    def csv_rows(self):
        for lo, hi, m in zip(self.edges[:-1], self.edges[1:], self.masses):
            yield f"{lo:.17g}", f"{hi:.17g}", f"{m:.17g}"


def _check_bins(bins: int) -> None:
    if bins < 2 or bins % 2:
        raise BadParameter("bins must be an even integer >= 2")


def sphere_distance_histogram(d: int, N: int, bins: int, seed: int, threads: int = 1) -> DistanceHistogram:
    """Histogram of sampled distances on ``S^d`` over ``[0, pi]``.

    ``fit`` tests against the exact distance law (uniform when ``d = 1``,
    density proportional to ``sin^(d-1)`` in general).
    """
    if d < 1:
        raise BadDimension("sphere dimension must be at least 1")
    _check_sampling(N)
    _check_bins(bins)
    edges = np.linspace(0.0, np.pi, bins + 1)
    acc = _run(_sphere_draw(d), N, seed, edges, threads)
    expected = np.diff(sphere_distance_cdf(edges, d))
    return DistanceHistogram(edges, acc.hist, _estimate(acc, seed), mirror_symmetry_test(acc.hist),
                             goodness_of_fit(acc.hist, expected), expected)


def torus_distance(p, q) -> float:
    """Distance on ``R^2 / Z^2`` with the quotient Euclidean metric."""
    delta = np.abs(np.asarray(p, float) - np.asarray(q, float)) % 1.0
    delta = np.minimum(delta, 1.0 - delta)
    return float(np.hypot(delta[0], delta[1]))


def _torus_draw(rng, m):
    delta = np.abs(rng.random((m, 2)) - rng.random((m, 2)))
    delta = np.minimum(delta, 1.0 - delta)
    return np.hypot(delta[:, 0], delta[:, 1]), 0


def flat_torus_mean_distance(N: int, seed: int, threads: int = 1) -> SampleEstimate:
    _check_sampling(N)
    return _estimate(_run(_torus_draw, N, seed, None, threads), seed)


def flat_torus_histogram(N: int, bins: int, seed: int, threads: int = 1) -> DistanceHistogram:
    _check_sampling(N)
    _check_bins(bins)
    edges = np.linspace(0.0, TORUS_DIAMETER, bins + 1)
    acc = _run(_torus_draw, N, seed, edges, threads)
    return DistanceHistogram(edges, acc.hist, _estimate(acc, seed), mirror_symmetry_test(acc.hist))


@dataclass(frozen=True)
class StatisticalBounds:
    """Position of a sampled mean inside ``[D/2, D]`` in standard errors.

    A bound is *contradicted* only when the mean lies more than ``sigmas``
    standard errors on the wrong side of it. ``lower_tight`` means the mean
    is within ``TIGHT_SIGMAS`` of ``D/2``, i.e. consistent with equality.
    """

    lower_margin: float
    upper_margin: float
    sigmas: float

    @property
    def lower_ok(self) -> bool:
        return self.lower_margin > -self.sigmas

    @property
    def upper_ok(self) -> bool:
        return self.upper_margin > -self.sigmas

    @property
    def strictly_inside(self) -> bool:
        return self.lower_margin > self.sigmas and self.upper_margin > self.sigmas

    @property
    def lower_tight(self) -> bool:
        return abs(self.lower_margin) < TIGHT_SIGMAS


TIGHT_SIGMAS = 4.0


def statistical_bounds(est: SampleEstimate, D: float, sigmas: float = 10.0) -> StatisticalBounds:
    return StatisticalBounds((est.mean - D / 2) / est.stderr, (D - est.mean) / est.stderr, sigmas)


# p-adic integers truncated to Z / p^k


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def valuations(p: int, k: int, values: np.ndarray) -> np.ndarray:
    """p-adic valuation of each residue mod ``p^k``, with 0 assigned ``k``."""
    v = np.zeros(values.shape, dtype=np.int64)
    rest = values.astype(np.int64)
    for _ in range(k):
        hit = (rest % p == 0) & (v < k)
        if not hit.any():
            break
        v += hit
        rest = np.where(hit, rest // p, rest)
    return v


def padic_distance(x: int, y: int, p: int) -> Fraction:
    """``p^(-v(x - y))`` on the integers; 0 when ``x == y``."""
    diff = abs(x - y)
    if diff == 0:
        return Fraction(0)
    v = 0
    while diff % p == 0:
        diff //= p
        v += 1
    return Fraction(1, p**v)


def _check_padic(p: int, k: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise BadParameter("depth must be at least 1")


@dataclass(frozen=True, eq=False)
class PadicTruncation:
    """``Z / p^k`` with the metric ``p^(-v(x - y))`` and uniform (Haar) weights."""

    p: int
    k: int
    space: FiniteMetricSpace
    automorphisms: AutomorphismSet


def padic_space(p: int, k: int, cap: int | None = None) -> PadicTruncation:
    from .graphs import MAX_MATRIX_VERTICES

    _check_padic(p, k)
    n = p**k
    if n > (cap or MAX_MATRIX_VERTICES):
        raise TooLarge(f"p^k = {n} exceeds the distance-matrix cap")
    r = np.arange(n, dtype=np.int64)
    # distance p^-v written over the common denominator p^(k-1)
    table = p ** (k - 1 - np.minimum(valuations(p, k, r), k - 1))
    table[0] = 0
    numer = table[(r[:, None] - r[None, :]) % n]
    space = FiniteMetricSpace.trusted(numer, p ** (k - 1))
    shift = AutomorphismSet(n, ((r + 1) % n,), source=f"construction: translations of Z/{p}^{k}")
    return PadicTruncation(p, k, space, shift)


@dataclass(frozen=True)
class PadicAverage:
    p: int
    k: int
    value: Fraction
    limit: Fraction
    upper_bound: Fraction

    @property
    def gap(self) -> Fraction:
        return self.limit - self.value

    @property
    def bounds_ok(self) -> bool:
        return Fraction(1, 2) <= self.value <= self.upper_bound


ENUMERATION_LIMIT = 1 << 24


def padic_shells(p: int, k: int) -> dict[int, int]:
    """Number of residues mod ``p^k`` of each valuation ``0..k``.

    Residues are enumerated directly up to ``ENUMERATION_LIMIT``; beyond that
    each shell is counted as the multiples of ``p^v`` minus those of ``p^(v+1)``.
    """
    _check_padic(p, k)
    n = p**k
    if n <= ENUMERATION_LIMIT:
        counts = np.bincount(valuations(p, k, np.arange(n)), minlength=k + 1)
        return {v: int(c) for v, c in enumerate(counts)}
    multiples = [n // p**v for v in range(k + 1)] + [0]
    return {v: multiples[v] - multiples[v + 1] for v in range(k + 1)}


def padic_average(p: int, k: int) -> PadicAverage:
    """Exact average distance on ``Z / p^k`` from the valuation shells around 0.

    Translations act transitively, so the profile from 0 is every point's
    profile and ``A = sum_v |shell_v| p^-v / p^k`` over nonzero residues.
    """
    shells = padic_shells(p, k)
    total = sum((Fraction(c, p**v) for v, c in shells.items() if v < k), Fraction(0))
    return PadicAverage(p, k, total / p**k, Fraction(p, p + 1), 1 - Fraction(1, p**k))
