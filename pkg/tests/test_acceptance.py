"""Acceptance suite: ten end-to-end criteria at their stated tolerances.

Each criterion prints one PASS/FAIL line with its runtime. Run directly with
``python tests/test_acceptance.py`` or through pytest.
"""
from __future__ import annotations

import json
import math
import random
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path
from types import SimpleNamespace

import networkx as nx
import numpy as np
import pytest
from networkx.generators.atlas import graph_atlas_g

sys.path.insert(0, str(Path(__file__).parent))

from antipode import (  # noqa: E402
    AbelianCayley,
    Graph,
    Tier,
    apsp_metric,
    automorphism_search,
    cayley,
    check_bounds,
    classify_antipodality,
    complete,
    cycle,
    detect_extremal_upper,
    distance_distribution,
    hypercube,
    is_vertex_transitive,
    padic_average,
    padic_space,
    path,
    petersen,
    sample_sphere_mean_distance,
    sphere_distance_histogram,
    star,
    symmetry_check,
    transitive_distribution,
    validate_metric,
    verify_involution_properties,
)
from antipode.cli import sample_report  # noqa: E402
from antipode.errors import TriangleViolation  # noqa: E402
from oracles import antipodal_tier, floyd_warshall, graph_automorphisms, moments, orbit_partition  # noqa: E402

F = Fraction


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def within(limit, started, what):
    elapsed = time.perf_counter() - started
    check(elapsed < limit, f"{what} took {elapsed:.2f}s, limit {limit}s")


def binomial(d):
    return {F(k): F(math.comb(d, k), 2**d) for k in range(d + 1)}


def analyze(g):
    X = apsp_metric(g)
    auts = g.automorphisms or automorphism_search(g)
    return X, auts, check_bounds(X), classify_antipodality(X, auts, verify_evidence=g.automorphisms is None)


def hypercube_exactness():
    t0 = time.perf_counter()
    for d in range(1, 13):
        g = hypercube(d)
        X, auts, b, rep = analyze(g)
        check(b.D == d and b.A == F(d, 2), f"Q_{d}: D={b.D}, A={b.A}")
        check(rep.tier is Tier.STRICTLY_ANTIPODAL, f"Q_{d}: tier {rep.tier.name}")
        check(np.array_equal(rep.antipodal_map, np.arange(2**d) ^ (2**d - 1)), f"Q_{d}: map is not complement")
        check(distance_distribution(X).as_dict() == binomial(d), f"Q_{d}: distribution not binomial")
    within(10, t0, "Q_1..Q_12")
    return "Q_1..Q_12: D=d, A=d/2, bit complement, binomial law"


def cycle_exactness():
    t0 = time.perf_counter()
    for n in range(2, 51):
        X, _, b, rep = analyze(cycle(2 * n))
        check(b.A == F(n, 2), f"C_{2 * n}: A={b.A}")
        want = {F(j): (F(1, 2 * n) if j in (0, n) else F(1, n)) for j in range(n + 1)}
        check(distance_distribution(X).as_dict() == want, f"C_{2 * n}: distribution")
        check(rep.tier is Tier.STRICTLY_ANTIPODAL, f"C_{2 * n}: tier {rep.tier.name}")
        _, _, _, odd = analyze(cycle(2 * n + 1))
        check(odd.tier is Tier.ANTIPODAL, f"C_{2 * n + 1}: tier {odd.tier.name}")
    within(5, t0, "cycles")
    return "C_4..C_100 exact; C_5..C_101 antipodal, not uniquely"


def upper_extremal():
    for n in range(2, 21):
        X, _, b, _ = analyze(complete(n))
        up = detect_extremal_upper(X)
        check(b.D == 1 and b.A_bar == 1 and b.A == 1 - F(1, n), f"K_{n}: A={b.A}, A_bar={b.A_bar}")
        check(b.upper_tight and up.is_extremal and up.scale == 1, f"K_{n}: not extremal")
    return "K_2..K_20: A_bar = D = 1, A = (1 - 1/n) D"


def petersen_graph():
    g = petersen()
    verdict = is_vertex_transitive(g)
    check(verdict.transitive and len(verdict.orbits) == 1, "no transitivity certificate")
    X, auts, b, rep = analyze(g)
    D, A, E2 = moments(floyd_warshall(10, g.edges().tolist()))
    check((b.D, b.A, b.E_d2) == (2, F(3, 2), F(27, 10)), f"D={b.D}, A={b.A}, E={b.E_d2}")
    check((b.D, b.A, b.E_d2) == (D, A, E2), "disagrees with pair enumeration")
    check(b.lower_slack > 0 and b.upper_slack > 0, "not strictly inside the bounds")
    check(rep.tier is Tier.ANTIPODAL, f"tier {rep.tier.name}")
    return f"|Aut| = {auts.group_order}, D = 2, A = 3/2, E[d^2] = 27/10, ANTIPODAL"


def random_abelian_cayley(rng):
    while True:
        moduli = [rng.randint(2, 12) for _ in range(rng.randint(1, 3))]
        n = math.prod(moduli)
        if n > 512:
            continue
        elements = [tuple(int(c) for c in np.unravel_index(i, moduli)) for i in range(1, n)]
        chosen = set()
        for s in rng.sample(elements, rng.randint(1, min(6, n - 1))):
            chosen.add(s)
            chosen.add(tuple((-c) % m for c, m in zip(s, moduli)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = cayley(AbelianCayley(moduli, sorted(chosen)))
        if g.connected:
            return g


def property_suite():
    t0 = time.perf_counter()
    rng = random.Random(20261017)
    strict_seen = 0
    for i in range(200):
        g = random_abelian_cayley(rng)
        X, auts, b, rep = analyze(g)
        n = g.n
        tag = f"#{i} {g.name}"
        check(b.D / 2 <= b.A <= (1 - F(1, n)) * b.D, f"{tag}: A={b.A} outside [D/2, mu D]")
        check(b.A_bar == b.A * n / (n - 1), f"{tag}: A_bar")
        check(b.D**2 / 8 <= b.E_d2 <= b.D**2, f"{tag}: E[d^2]={b.E_d2}")
        if rep.tier is Tier.STRICTLY_ANTIPODAL:
            strict_seen += 1
            inv = verify_involution_properties(rep.antipodal_map, X, auts)
            check(n % 2 == 0 and inv.fixed_point_free and inv.all_hold, f"{tag}: involution")
            check(symmetry_check(distance_distribution(X), b.D).passed, f"{tag}: histogram not symmetric")
            check(b.lower_tight, f"{tag}: A != D/2")
    within(60, t0, "200 Cayley graphs")
    return f"200 graphs, {strict_seen} strictly antipodal, all exact checks hold"


def brute_force_equivalence():
    t0 = time.perf_counter()
    graphs = [h for h in graph_atlas_g() if h.number_of_nodes() > 0 and nx.is_connected(h)]
    for h in graphs:
        n, edges = h.number_of_nodes(), list(h.edges())
        g = Graph.from_edges(n, edges)
        group = graph_automorphisms(n, edges)
        auts = automorphism_search(g)
        check(auts.group_order == len(group), f"{edges}: order {auts.group_order} vs {len(group)}")
        check(list(auts.orbits) == orbit_partition(n, group), f"{edges}: orbits")
        check(is_vertex_transitive(g, auts).transitive == (len(orbit_partition(n, group)) == 1),
              f"{edges}: transitivity")
        if n >= 2:
            d = floyd_warshall(n, edges)
            tier = classify_antipodality(apsp_metric(g), auts).tier.name
            check(tier == antipodal_tier(d, group), f"{edges}: tier {tier}")
    within(600, t0, "atlas")
    return f"{len(graphs)} connected graphs on <= 7 vertices match n! enumeration"


def fast_path():
    t0 = time.perf_counter()
    dist = transitive_distribution(hypercube(16))
    within(1, t0, "Q_16 single BFS")
    check(dist.as_dict() == binomial(16), "Q_16 not binomial")
    g = hypercube(10)
    check(transitive_distribution(g) == distance_distribution(apsp_metric(g)), "Q_10 disagrees with APSP")
    return "Q_16 binomial from one BFS; Q_10 equals APSP"


def padic():
    t0 = time.perf_counter()
    for p in (2, 3, 5):
        for k in range(1, 7):
            value = padic_average(p, k).value
            check(value == F(p, p + 1) * (1 - F(1, p ** (2 * k))), f"p={p} k={k}: {value}")
            if p**k <= 1024:
                check(check_bounds(padic_space(p, k).space).A == value, f"p={p} k={k}: matrix average")
    gap = abs(padic_average(2, 10).value - F(2, 3))
    check(gap < F(1, 10**6), f"p=2 k=10 gap {float(gap)}")
    within(30, t0, "p-adic")
    return f"closed form exact for p in 2,3,5 and k <= 6; |A_10 - 2/3| = {float(gap):.3g}"


def sphere_statistics():
    t0 = time.perf_counter()
    notes = []
    for d in (1, 2, 3):
        h = sphere_distance_histogram(d, 10**6, 64, seed=7)
        est = h.estimate
        z = abs(est.mean - math.pi / 2) / est.stderr
        check(z < 4, f"S^{d}: mean off by {z:.2f} SE")
        check(h.symmetry.passed, f"S^{d}: symmetry test failed")
        if d == 1:
            check(h.fit.passed and np.allclose(h.expected, 1 / 64), "S^1: uniformity test failed")
        notes.append(f"S^{d} {z:.2f}SE")
    args = SimpleNamespace(space="sphere", d=2, n=10**6, seed=7, bins=64, csv=None, threads=1)
    first = json.dumps(sample_report(args), indent=2) + sample_report(args)[1]
    args.threads = 4
    second = json.dumps(sample_report(args), indent=2) + sample_report(args)[1]
    check(first == second, "output not byte-reproducible")
    check(sample_sphere_mean_distance(1, 10**5, 3) == sample_sphere_mean_distance(1, 10**5, 3, threads=2),
          "estimate depends on thread count")
    within(30, t0, "sphere sampling")
    return ", ".join(notes) + "; byte-reproducible"


def negative_controls():
    for g in (path(3), path(6), star(3), star(7)):
        check(not is_vertex_transitive(g).transitive, f"{g.name} not refuted")
    X = validate_metric([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    rep = symmetry_check(distance_distribution(X), 2)
    check(not rep.passed and rep.first_violation == 0, "P_3 symmetric?")
    try:
        validate_metric([[0, 5, 10], [5, 0, 1], [10, 1, 0]])
    except TriangleViolation as exc:
        check(exc.witness == (0, 2, 1), f"witness {exc.witness}")
    else:
        raise AssertionError("triangle violation accepted")
    return "paths and stars refuted; P_3 asymmetric; witness (0,2,1)"


CRITERIA = {
    1: ("hypercube exactness", hypercube_exactness),
    2: ("cycle exactness", cycle_exactness),
    3: ("upper extremal", upper_extremal),
    4: ("Petersen graph", petersen_graph),
    5: ("Cayley property suite", property_suite),
    6: ("brute-force oracle equivalence", brute_force_equivalence),
    7: ("single-BFS fast path", fast_path),
    8: ("p-adic averages", padic),
    9: ("sphere statistics", sphere_statistics),
    10: ("negative controls", negative_controls),
}


def run_criterion(number):
    name, fn = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        detail, ok = fn(), True
    except AssertionError as exc:
        detail, ok = str(exc), False
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {name} ({time.perf_counter() - t0:.2f}s): {detail}"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
