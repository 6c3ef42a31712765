import itertools
import math

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import small_graphs, to_nx, trees
from isreconf.graph import (
    Graph,
    ParseError,
    ball,
    bipartition,
    classify,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    find_induced_cycle,
    girth,
    heawood_graph,
    is_induced_cycle,
    is_r_independent,
    layers,
    parse_graph,
    path_graph,
    petersen_graph,
    serialize_graph,
    shortest_path,
)


def test_parse_k2():
    g = parse_graph("p edge 2 1\ne 1 2\n")
    assert (g.n, g.m) == (2, 1)


def test_parse_edgeless():
    g = parse_graph("p edge 3 0\n")
    assert (g.n, g.m) == (3, 0)


def test_parse_duplicate_collapses():
    g = parse_graph("p edge 3 2\ne 1 2\ne 1 2\ne 2 3\n")
    assert g.m == 2 and g.adj == ((1,), (0, 2), (1,))


def test_parse_comments_and_blank_lines():
    g = parse_graph("c hello\n\np edge 2 1\nc mid\ne 2 1\n")
    assert g.edges() == [(0, 1)]


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("p edge x 1\n", 1),
        ("p edge 2 1\ne 1 3\n", 2),
        ("p edge 2 1\ne 2 2\n", 2),
        ("e 1 2\n", 1),
        ("p edge 2 0\np edge 2 0\n", 2),
        ("p edge 2 1\ne 1\n", 2),
        ("", 1),
    ],
)
def test_parse_errors_name_line(text, lineno):
    with pytest.raises(ParseError) as exc:
        parse_graph(text)
    assert exc.value.lineno == lineno


def test_bipartition_examples():
    b = bipartition(cycle_graph(4))
    assert b.left == {0, 2} and b.right == {1, 3}
    assert bipartition(cycle_graph(3)) is None
    b = bipartition(Graph.from_edges(3, []))
    assert b.left == {0, 1, 2} and not b.right


def test_find_induced_cycle_examples():
    assert sorted(find_induced_cycle(cycle_graph(5), 5)) == [0, 1, 2, 3, 4]
    assert find_induced_cycle(complete_graph(4), 4) is None
    pet = petersen_graph()
    assert find_induced_cycle(pet, 3) is None
    assert find_induced_cycle(pet, 4) is None
    assert is_induced_cycle(pet, find_induced_cycle(pet, 5))


def test_girth_examples():
    assert girth(path_graph(5)) == math.inf
    assert girth(cycle_graph(4)) == 4
    assert girth(petersen_graph()) == 5
    assert girth(heawood_graph()) == 6


def test_classify_examples():
    r = classify(cycle_graph(5), 5, [1.0])
    assert r.bipartite is None and r.girth == 5 and r.induced_cycle_free[4]
    assert r.max_degree == 2 and r.sparsity[1.0]
    r = classify(complete_bipartite(3, 3), 4, [0.5])
    assert r.bipartite is not None and r.girth == 4 and not r.induced_cycle_free[4]
    r = classify(heawood_graph(), 5)
    assert r.bipartite is not None and r.induced_cycle_free[4] and r.induced_cycle_free[5]
    with pytest.raises(ValueError):
        classify(cycle_graph(5), 2)


def test_ball_examples():
    p5 = path_graph(5)
    assert ball(p5, 2, 0) == {2}
    assert ball(p5, 2, 1) == {1, 2, 3}
    assert ball(p5, 0, 10) == set(range(5))
    assert layers(p5, 0, 3) == [[0], [1], [2], [3]]


def test_r_independence_examples():
    p7 = path_graph(7)
    assert is_r_independent(p7, [0, 3, 6], 2)
    assert not is_r_independent(p7, [0, 2], 2)
    c6 = cycle_graph(6)
    assert is_r_independent(c6, [0, 3], 2)
    assert not is_r_independent(c6, [0, 2], 2)


def test_shortest_path_is_lexicographic():
    assert shortest_path(cycle_graph(6), 0, 3) == [0, 1, 2, 3]
    assert shortest_path(Graph.from_edges(4, []), 0, 3) is None


# ---------------------------------------------------------------- properties


@settings(max_examples=150, deadline=None)
@given(small_graphs(1, 9))
def test_parse_serialize_roundtrip(g):
    assert parse_graph(serialize_graph(g)) == g


@settings(max_examples=150, deadline=None)
@given(small_graphs(1, 9))
def test_degree_sum_and_symmetry(g):
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m
    assert all(u in g.nbr_sets[w] for u in range(g.n) for w in g.adj[u])


@settings(max_examples=150, deadline=None)
@given(small_graphs(1, 9))
def test_bipartition_matches_networkx(g):
    b = bipartition(g)
    assert (b is not None) == nx.is_bipartite(to_nx(g))
    if b is not None:
        assert b.left | b.right == set(range(g.n)) and not b.left & b.right
        assert all(b.side_of(u) != b.side_of(w) for u, w in g.edges())
        for comp in g.components():
            assert min(comp) in b.left


@settings(max_examples=150, deadline=None)
@given(small_graphs(1, 9))
def test_bipartite_iff_no_odd_induced_cycle(g):
    odd = any(find_induced_cycle(g, ell) for ell in range(3, g.n + 1, 2))
    assert (bipartition(g) is not None) == (not odd)


@settings(max_examples=120, deadline=None)
@given(small_graphs(3, 8), st.integers(3, 6))
def test_induced_cycle_matches_subset_search(g, ell):
    found = find_induced_cycle(g, ell)
    if found is not None:
        assert len(found) == ell and is_induced_cycle(g, found)
    brute = any(
        nx.is_isomorphic(to_nx(g).subgraph(sub), nx.cycle_graph(ell))
        for sub in itertools.combinations(range(g.n), ell)
    )
    assert (found is not None) == brute


@settings(max_examples=150, deadline=None)
@given(small_graphs(1, 9))
def test_girth_matches_networkx(g):
    expected = nx.girth(to_nx(g))
    assert girth(g) == expected


@settings(max_examples=100, deadline=None)
@given(small_graphs(1, 9))
def test_classify_invariants(g):
    r = classify(g, 6)
    if r.girth < math.inf and r.girth <= 6:
        assert r.induced_cycle_free[int(r.girth)] is False
    if r.bipartite is not None:
        assert all(r.induced_cycle_free[ell] for ell in (3, 5))


@settings(max_examples=100, deadline=None)
@given(trees(2, 12), st.data())
def test_ball_monotone_and_exhaustive(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    r = data.draw(st.integers(0, g.n))
    assert ball(g, v, r) <= ball(g, v, r + 1)
    assert len(ball(g, v, g.n)) == g.n
