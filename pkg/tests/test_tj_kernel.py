import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from helpers import independent_sets, ref_bfs, ref_independent, small_graphs
from isreconf.graph import (
    Graph,
    classify,
    complete_graph,
    cycle_graph,
    girth,
    path_graph,
    petersen_graph,
    star_graph,
)
from isreconf.oracle import TJ, Instance, bfs_reach, verify_sequence
from isreconf.tj_kernel import (
    KernelThresholds,
    RouteError,
    greedy_sparse_independent_set,
    kernelize_tj,
    neighborhood_degree_rule,
    reduced_bound,
    sparse_part_rule,
    triangle_free_independent_set,
    triangle_free_rule,
)


def _tj(g, s, t):
    return Instance(g, s, t, TJ)


def test_thresholds():
    th = KernelThresholds(2, 1.0)
    assert (th.sparse, th.degree, th.triangle_free) == (8, 6, 3)
    assert KernelThresholds(3, 0.5).sparse == 3 * 36
    assert reduced_bound(2, 1.0, "c3c4-free") == 4 + 20 + 2


def test_greedy_sparse_examples():
    assert greedy_sparse_independent_set(path_graph(9), 2, 1.0) == [0, 2]
    assert greedy_sparse_independent_set(Graph.from_edges(3, []), 3, 1.0) == [0, 1, 2]
    with pytest.raises(RouteError):
        greedy_sparse_independent_set(complete_graph(5), 2, 0.9)


def test_triangle_free_set_examples():
    assert triangle_free_independent_set(cycle_graph(5), 2) == [0, 2]
    assert sorted(triangle_free_independent_set(star_graph(4), 4)) == [1, 2, 3, 4]
    pet = petersen_graph()
    got = triangle_free_independent_set(pet, 4)
    assert len(got) >= 3 and ref_independent(pet.adj, got)


def test_sparse_rule_examples():
    # S, T on an isolated edge pair region, H is a disjoint P9 tail
    edges = [(0, 1), (2, 3)] + [(4 + i, 5 + i) for i in range(8)]
    g = Graph.from_edges(13, edges)
    inst = _tj(g, {0, 2}, {1, 3})
    moves = sparse_part_rule(inst, 1.0)
    assert len(moves) == 4 and verify_sequence(inst, moves) is None
    small = Graph.from_edges(9, [(0, 1), (2, 3)] + [(4 + i, 5 + i) for i in range(4)])
    assert sparse_part_rule(_tj(small, {0, 2}, {1, 3}), 1.0) is None
    one = Graph.from_edges(5, [(0, 1), (2, 3), (3, 4)])
    moves = sparse_part_rule(_tj(one, {0}, {1}), 1.0)
    assert len(moves) == 2 and verify_sequence(_tj(one, {0}, {1}), moves) is None


def test_neighborhood_rule_examples():
    # w=0 with six neighbours, the tail 6-7-8-9 carries the far token
    g = Graph.from_edges(10, [(0, i) for i in range(1, 7)] + [(6, 7), (7, 8), (8, 9)])
    inst = _tj(g, {0, 8}, {1, 9})
    moves = neighborhood_degree_rule(inst)
    assert moves is not None and len(moves) <= 4
    assert verify_sequence(inst, moves) is None
    assert moves[0].src == 0
    assert neighborhood_degree_rule(_tj(path_graph(12), {0, 6}, {3, 9})) is None
    tri = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])
    with pytest.raises(RouteError):
        neighborhood_degree_rule(_tj(tri, {0}, {4}))


def test_kernelize_examples():
    c6 = cycle_graph(6)
    out = kernelize_tj(_tj(c6, {0, 3}, {1, 4}), classify(c6))
    assert out.status == "reduced" and out.size_bound == 26 and out.instance.graph is c6
    assert out.trace == ("route:c3c4-free", "degree-3k:pass", "triangle-free-H:pass")
    p9 = path_graph(9)
    out = kernelize_tj(_tj(p9, {0}, {8}), classify(p9))
    assert out.status == "yes" and len(out.moves) == 2
    hub = Graph.from_edges(10, [(0, i) for i in range(1, 7)] + [(6, 7), (7, 8), (8, 9)])
    out = kernelize_tj(_tj(hub, {0, 8}, {1, 9}), classify(hub))
    assert out.status == "yes" and out.trace[-1] == "degree-3k"
    with pytest.raises(RouteError):
        kernelize_tj(_tj(complete_graph(4), {0}, {1}), classify(complete_graph(4)), eps=1.0)
    with pytest.raises(RouteError):
        kernelize_tj(Instance(p9, {0}, {8}), classify(p9))


def test_large_c3c4_free_graph_decides_yes():
    # |V| = 40 > 6k^2 + k(k-1) + 1 for k = 2, so one rule must fire
    g = path_graph(40)
    for s, t in [({0, 2}, {37, 39}), ({10, 20}, {11, 21}), ({5, 30}, {6, 31})]:
        out = kernelize_tj(_tj(g, s, t), classify(g))
        assert out.status == "yes" and bfs_reach(_tj(g, s, t)).reachable


def test_quadratic_bound_too_tight_for_one_token():
    # both rules pass on P6 with k=1: 6 vertices exceed 6k^2 - 2k + k(k-1) + 1 = 5
    g = path_graph(6)
    out = kernelize_tj(_tj(g, {1}, {4}), classify(g))
    assert out.status == "reduced" and g.n == 6 > 5
    assert g.n <= out.size_bound == 7 * 1 - 1


# ---------------------------------------------------------------- properties


@st.composite
def girth5_cases(draw):
    g = draw(small_graphs(2, 10))
    assume(girth(g) >= 5)
    k = draw(st.integers(1, 3))
    sets = independent_sets(g, k)
    assume(sets)
    return g, draw(st.sampled_from(sets)), draw(st.sampled_from(sets))


@settings(max_examples=300, deadline=None)
@given(girth5_cases())
def test_kernel_sound_on_girth5(case):
    g, s, t = case
    inst = _tj(g, s, t)
    out = kernelize_tj(inst, classify(g))
    if out.status == "yes":
        assert verify_sequence(inst, out.moves) is None
        assert len(out.moves) <= 2 * inst.k
        assert ref_bfs(g.adj, s, t, False) is not None
    else:
        assert out.status == "reduced" and g.n <= out.size_bound


@settings(max_examples=200, deadline=None)
@given(small_graphs(1, 12), st.integers(1, 3))
def test_greedy_sparse_meets_threshold(h, k):
    assume(h.m <= h.n)
    got = greedy_sparse_independent_set(h, k, 1.0)
    if h.n > KernelThresholds(k, 1.0).sparse:
        assert got is not None
    if got is not None:
        assert len(got) == k and ref_independent(h.adj, got)


@settings(max_examples=200, deadline=None)
@given(small_graphs(1, 12), st.integers(1, 3))
def test_triangle_free_set_meets_threshold(h, k):
    assume(girth(h) >= 4)
    got = triangle_free_independent_set(h, k)
    assert ref_independent(h.adj, got)
    if h.n >= KernelThresholds(k, 1.0).triangle_free:
        assert len(got) == k


@settings(max_examples=150, deadline=None)
@given(girth5_cases())
def test_triangle_rule_witness_short(case):
    g, s, t = case
    inst = _tj(g, s, t)
    moves = triangle_free_rule(inst)
    if moves is not None:
        assert len(moves) <= 2 * inst.k and verify_sequence(inst, moves) is None
