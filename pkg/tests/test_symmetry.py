import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antipode import (
    ColoredPartition,
    Graph,
    automorphism_search,
    complete,
    cycle,
    find_mapping_automorphism,
    homogeneity_verdict,
    hypercube,
    is_automorphism,
    is_vertex_transitive,
    isometry_search,
    orbit_of,
    padic_space,
    path,
    petersen,
    refine_colors,
    star,
    validate_metric,
)
from antipode.errors import Inconclusive
from antipode.groups import closure_order
from oracles import graph_automorphisms, isometries, orbit_partition


def bare(g):
    """Same graph without its construction certificate."""
    return Graph(g.indptr, g.indices, g.name)


def from_nx(h):
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


@pytest.mark.parametrize("g, order", [
    (petersen(), 120),
    (bare(hypercube(3)), 48),
    (bare(hypercube(5)), 2**5 * math.factorial(5)),
    (bare(cycle(12)), 24),
    (bare(complete(6)), 720),
    (path(5), 2),
    (star(4), 24),
])
def test_group_orders(g, order):
    auts = automorphism_search(g)
    assert not auts.truncated
    assert auts.group_order == order
    assert all(is_automorphism(g, h) for h in auts.generators)


def test_group_order_matches_closure():
    g = petersen()
    auts = automorphism_search(g)
    assert closure_order(auts.generators, g.n) == 120


def test_frucht_graph_is_rigid_and_refuted():
    g = from_nx(nx.frucht_graph())
    assert (g.degrees == 3).all()
    assert refine_colors(g).num_classes == 1
    auts = automorphism_search(g)
    assert auts.group_order == 1
    verdict = is_vertex_transitive(g, auts)
    assert not verdict and "orbits" in verdict.reason


def test_negative_controls_refuted_by_degree():
    for g in (path(4), star(5)):
        verdict = is_vertex_transitive(g)
        assert not verdict.transitive
        assert verdict.reason.startswith("degree")
        u, v = verdict.separated
        assert g.degrees[u] != g.degrees[v]


def test_petersen_certified_by_search():
    verdict = is_vertex_transitive(petersen())
    assert verdict.transitive and len(verdict.orbits) == 1


def test_refinement_on_path():
    part = refine_colors(path(5))
    assert sorted(part.classes()) == [(0, 4), (1, 3), (2,)]
    assert not part.discrete
    assert ColoredPartition.uniform(3).num_classes == 1


def test_refinement_with_initial_colors():
    part = refine_colors(cycle(6), ColoredPartition(np.array([1, 0, 0, 0, 0, 0])))
    assert sorted(part.classes(), key=min) == [(0,), (1, 5), (2, 4), (3,)]


def test_mapping_automorphisms_petersen():
    g = petersen()
    auts = automorphism_search(g)
    for x in range(10):
        for y in range(10):
            p = find_mapping_automorphism(x, y, g, auts)
            assert p[x] == y and is_automorphism(g, p)
    assert orbit_of(3, auts) == tuple(range(10))


def test_mapping_across_orbits_is_none():
    g = path(3)
    auts = automorphism_search(g)
    assert find_mapping_automorphism(0, 1, g, auts) is None


def test_budget_truncates():
    g = bare(hypercube(6))
    auts = automorphism_search(g, budget=5)
    assert auts.truncated and auts.group_order is None
    assert all(is_automorphism(g, h) for h in auts.generators)


def test_truncated_evidence_is_inconclusive_on_regular_graph():
    g = from_nx(nx.frucht_graph())
    auts = automorphism_search(g, budget=1)
    assert auts.truncated
    with pytest.raises(Inconclusive):
        is_vertex_transitive(g, auts)


def test_isometry_search_padic():
    X = padic_space(2, 3).space
    auts = isometry_search(X)
    # automorphisms of the depth-3 binary tree
    assert auts.group_order == 2**7
    assert homogeneity_verdict(X, auts).transitive


def test_isometry_search_matches_brute_force():
    m = [[0, 1, 2, 2], [1, 0, 2, 2], [2, 2, 0, 3], [2, 2, 3, 0]]
    auts = isometry_search(validate_metric(m))
    assert auts.group_order == len(isometries(m))
    verdict = homogeneity_verdict(validate_metric(m), auts)
    assert not verdict.transitive and len(verdict.orbits) == 2


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 7))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return n, [e for e, keep in zip(pairs, mask) if keep]


@settings(max_examples=120, deadline=None)
@given(small_graphs())
def test_search_matches_enumeration(case):
    n, edges = case
    g = Graph.from_edges(n, edges)
    auts = automorphism_search(g)
    group = graph_automorphisms(n, edges)
    assert auts.group_order == len(group)
    assert list(auts.orbits) == orbit_partition(n, group)
