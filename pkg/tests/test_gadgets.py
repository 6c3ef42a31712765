import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ref_independent
from isreconf.graph import Graph, bipartition
from isreconf.oracle import Move, bfs_reach, replay, verify_sequence
from isreconf.gadgets import (
    GadgetError,
    build_guard_gadget,
    build_mis_gadget,
    check_guard_structure,
    check_mis_equivalence,
    guard_counts_ok,
    guard_yes_witness,
    independent_transversal,
    is_well_organized,
    max_independent_set_size,
    mis_yes_witness,
)

TWO_TRIANGLES = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
TWO_K1 = Graph.from_edges(2, [])


def test_guard_sizes():
    gad = build_guard_gadget(TWO_TRIANGLES, [[0, 1, 2], [3, 4, 5]], 4)
    assert gad.gprime.n == 38 and len(gad.source) == len(gad.target) == 16 == gad.token_count
    one = build_guard_gadget(Graph.from_edges(1, []), [[0]], 4)
    assert one.gprime.n == 19 and len(one.source) == 9


def test_guard_numbering_and_roles():
    gad = build_guard_gadget(TWO_K1, [[0], [1]], 4)
    assert gad.x == (2, 3) and gad.y == (4, 5) and gad.g_path == (6, 7, 8, 9)
    assert gad.roles[0] == "v_1" and gad.roles[6] == "g_1" and gad.roles[gad.z_paths[1][3]] == "z_2,4"
    assert all(guard_counts_ok(gad, c) for c in (gad.source, gad.target))


def test_guard_errors():
    with pytest.raises(GadgetError, match="even"):
        build_guard_gadget(TWO_K1, [[0], [1]], 5)
    with pytest.raises(GadgetError, match="clique"):
        build_guard_gadget(Graph.from_edges(2, []), [[0, 1]], 4)
    with pytest.raises(GadgetError):
        build_guard_gadget(TWO_K1, [[0]], 4)


def test_guard_witness_examples():
    gad = build_guard_gadget(TWO_K1, [[0], [1]], 4)
    moves = guard_yes_witness(gad, [0, 1])
    assert len(moves) == 2 + 7 * 2 + 2
    assert verify_sequence(gad.instance(), moves) is None
    assert all(guard_counts_ok(gad, c) for c in replay(gad.source, moves))
    one = build_guard_gadget(Graph.from_edges(1, []), [[0]], 4)
    assert len(guard_yes_witness(one, [0])) == 10
    edge = build_guard_gadget(Graph.from_edges(2, [(0, 1)]), [[0], [1]], 4)
    with pytest.raises(GadgetError):
        guard_yes_witness(edge, [0, 1])


def test_guard_structure_examples():
    gad = build_guard_gadget(TWO_K1, [[0], [1]], 4)
    rep = check_guard_structure(gad)
    assert rep.ok and rep.max_is == 16 and rep.reachable and rep.counts_ok
    c4 = Graph.from_edges(4, [(0, 1), (2, 3), (0, 2), (1, 3)])
    rep = check_guard_structure(build_guard_gadget(c4, [[0, 1], [2, 3]], 4), max_is=False)
    assert rep.gadget_cycle is not None and not rep.input_cycle_free
    assert rep.reachable is not None  # later checks still ran


def _guard_edge_classes(gad):
    return {
        "g-link": (gad.g_path[0], gad.g_path[1]),
        "x-link": (gad.x_paths[0][1], gad.x_paths[0][2]),
        "y-link": (gad.y_paths[1][2], gad.y_paths[1][3]),
        "z-link": (gad.z_paths[0][0], gad.z_paths[0][1]),
        "x-clique": (0, gad.x[0]),
        "y-clique": (0, gad.y[0]),
        "x-xpath": (gad.x[0], gad.x_paths[0][-1]),
        "g-xpath": (gad.g_path[-1], gad.x_paths[0][0]),
        "g-ypath": (gad.g_path[0], gad.y_paths[0][-1]),
        "y-ypath": (gad.y[0], gad.y_paths[0][0]),
        "x-zpath": (gad.x[0], gad.z_paths[0][-1]),
        "y-zpath": (gad.y[0], gad.z_paths[0][0]),
    }


@pytest.mark.parametrize("name", sorted(_guard_edge_classes(build_guard_gadget(TWO_K1, [[0], [1]], 4))))
def test_guard_mutation_detected(name):
    gad = build_guard_gadget(TWO_K1, [[0], [1]], 4)
    drop = tuple(sorted(_guard_edge_classes(gad)[name]))
    assert drop in gad.gprime.edges()
    mut = Graph.from_edges(gad.gprime.n, [e for e in gad.gprime.edges() if e != drop])
    assert not check_guard_structure(dataclasses.replace(gad, gprime=mut)).ok


def test_max_independent_set_size():
    assert max_independent_set_size(Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])) == 2
    assert max_independent_set_size(Graph.from_edges(4, [])) == 4


# ---------------------------------------------------------------- MIS gadget


def test_mis_sizes():
    g = Graph.from_edges(4, [(0, 2)])
    gad = build_mis_gadget(g, [[0, 1], [2, 3]])
    assert gad.gprime.n == 36 and len(gad.i_s) == len(gad.i_e) == 10
    assert bipartition(gad.gprime) is not None
    one = build_mis_gadget(Graph.from_edges(1, []), [[0]])
    assert len(one.i_s) == 6
    with pytest.raises(GadgetError):
        build_mis_gadget(g, [[0, 1], [2, 3], []])


def test_mis_witness_examples():
    g = Graph.from_edges(4, [(0, 2)])
    gad = build_mis_gadget(g, [[0, 1], [2, 3]])
    moves = mis_yes_witness(gad, [0, 3])
    assert len(moves) == 18 and verify_sequence(gad.instance(), moves) is None
    assert bfs_reach(gad.instance()).reachable
    assert moves[0] == Move(gad.a_start[0], gad.copy_of(0, "B", 1))
    one = build_mis_gadget(Graph.from_edges(1, []), [[0]])
    assert len(mis_yes_witness(one, [0])) == 10
    with pytest.raises(GadgetError):
        mis_yes_witness(gad, [0, 2])


def test_well_organized_examples():
    gad = build_mis_gadget(Graph.from_edges(4, [(0, 2)]), [[0, 1], [2, 3]])
    assert is_well_organized(gad, gad.i_s)
    first = replay(gad.i_s, [Move(gad.a_start[0], gad.copy_of(0, "B", 1))])[-1]
    assert is_well_organized(gad, first)
    gap = (gad.i_s - {gad.b_start[1]}) | {gad.b_copies[1][0]}  # B_2 holds a token, B_1 none
    assert not is_well_organized(gad, gap)
    assert not is_well_organized(gad, gad.i_s - {gad.s_a})


def test_mis_equivalence_examples():
    g = Graph.from_edges(4, [(0, 2)])
    rep = check_mis_equivalence(g, [[0, 1], [2, 3]])
    assert rep.ok and rep.reachable and rep.witness_ok and rep.scoped_well_organized
    kb = Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    rep = check_mis_equivalence(kb, [[0, 1], [2, 3]])
    assert rep.ok and rep.reachable is False and rep.mis is None
    rep = check_mis_equivalence(Graph.from_edges(2, [(0, 1)]), [[0, 1]])
    assert rep.ok and rep.reachable


# ---------------------------------------------------------------- properties


@st.composite
def clique_partitions(draw, max_parts=2, max_size=2):
    sizes = [draw(st.integers(1, max_size)) for _ in range(draw(st.integers(1, max_parts)))]
    parts, n = [], 0
    for s in sizes:
        parts.append(list(range(n, n + s)))
        n += s
    edges = [e for part in parts for e in itertools.combinations(part, 2)]
    cross = [(a, b) for i, j in itertools.combinations(range(len(parts)), 2) for a in parts[i] for b in parts[j]]
    edges += [e for e in cross if draw(st.booleans())]
    return Graph.from_edges(n, edges), parts


@settings(max_examples=30, deadline=None)
@given(clique_partitions())
def test_guard_equivalence(case):
    g, parts = case
    gad = build_guard_gadget(g, parts, 4)
    rep = check_guard_structure(gad, max_is=False)
    assert rep.reachable == (independent_transversal(g, parts) is not None)
    assert rep.counts_ok
    if rep.transversal is not None:
        moves = guard_yes_witness(gad, rep.transversal)
        assert len(moves) == gad.k + (3 * gad.k + 1) * 2 + gad.k


@st.composite
def partitioned_graphs(draw, max_parts=2, max_size=2):
    sizes = [draw(st.integers(1, max_size)) for _ in range(draw(st.integers(1, max_parts)))]
    parts, n = [], 0
    for s in sizes:
        parts.append(list(range(n, n + s)))
        n += s
    pairs = list(itertools.combinations(range(n), 2))
    return Graph.from_edges(n, [e for e in pairs if draw(st.booleans())]), parts


@settings(max_examples=40, deadline=None)
@given(partitioned_graphs())
def test_mis_equivalence(case):
    g, parts = case
    rep = check_mis_equivalence(g, parts)
    assert rep.ok, rep.failures
    if rep.mis is not None:
        assert ref_independent(g.adj, rep.mis)
