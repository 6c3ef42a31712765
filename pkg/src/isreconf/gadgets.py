"""Reduction gadgets: the guard-path construction and the bipartite multicolored-IS construction.

Both builders number vertices deterministically and return role maps so
instances can be inspected, serialised and replayed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Graph, bipartition, find_induced_cycle, is_independent
from .oracle import TS, Instance, LimitExceeded, Limits, Move, bfs_reach, reachable_rows, replay, verify_sequence


class GadgetError(ValueError):
    pass


def _check_partition(g: Graph, parts: Sequence[Sequence[int]]):
    seen = [x for part in parts for x in part]
    if any(not part for part in parts):
        raise GadgetError("empty part")
    if sorted(seen) != list(range(g.n)):
        raise GadgetError("parts do not partition the vertex set exactly")


def max_independent_set_size(g: Graph) -> int:
    """Exact maximum independent set size by branching on bitmasks."""
    nb = [sum(1 << w for w in g.adj[v]) for v in range(g.n)]
    memo: dict[int, int] = {}

    def solve(mask: int) -> int:
        if not mask:
            return 0
        if mask in memo:
            return memo[mask]
        best_v, best_d = -1, -1
        low_v, low_d = -1, g.n + 1
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            d = bin(nb[v] & mask).count("1")
            if d > best_d:
                best_v, best_d = v, d
            if d < low_d:
                low_v, low_d = v, d
        if low_d <= 1:
            out = 1 + solve(mask & ~(nb[low_v] | (1 << low_v)))
        else:
            v = best_v
            out = max(solve(mask & ~(1 << v)), 1 + solve(mask & ~(nb[v] | (1 << v))))
        memo[mask] = out
        return out

    return solve((1 << g.n) - 1)


# ---------------------------------------------------------------- guard paths


@dataclass(frozen=True)
class GuardGadget:
    gprime: Graph
    source_graph: Graph
    cliques: tuple[tuple[int, ...], ...]
    p: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    g_path: tuple[int, ...]
    x_paths: tuple[tuple[int, ...], ...]
    y_paths: tuple[tuple[int, ...], ...]
    z_paths: tuple[tuple[int, ...], ...]
    roles: dict[int, str]
    source: frozenset[int]
    target: frozenset[int]

    @property
    def k(self) -> int:
        return len(self.cliques)

    @property
    def token_count(self) -> int:
        return self.k + (3 * self.k + 1) * self.p // 2

    @property
    def guard_paths(self) -> list[tuple[int, ...]]:
        return [self.g_path, *self.x_paths, *self.y_paths, *self.z_paths]

    def w_set(self, i: int) -> frozenset[int]:
        return frozenset(self.cliques[i]) | {self.x[i], self.y[i]}

    def instance(self) -> Instance:
        return Instance(self.gprime, self.source, self.target, TS)


def build_guard_gadget(g: Graph, cliques: Sequence[Sequence[int]], p: int) -> GuardGadget:
    if p < 4 or p % 2:
        raise GadgetError(f"p must be even and at least 4, got {p}")
    _check_partition(g, cliques)
    for part in cliques:
        if any(not g.has_edge(a, b) for a, b in itertools.combinations(part, 2)):
            raise GadgetError(f"part {sorted(part)} is not a clique")
    k, n = len(cliques), g.n
    roles = {v: f"v_{v + 1}" for v in range(n)}
    nxt = itertools.count(n)

    def fresh(name):
        v = next(nxt)
        roles[v] = name
        return v

    x = tuple(fresh(f"x_{i + 1}") for i in range(k))
    y = tuple(fresh(f"y_{i + 1}") for i in range(k))
    gp = tuple(fresh(f"g_{j + 1}") for j in range(p))
    xp, yp, zp = [], [], []
    for i in range(k):
        xp.append(tuple(fresh(f"x_{i + 1},{j + 1}") for j in range(p)))
        yp.append(tuple(fresh(f"y_{i + 1},{j + 1}") for j in range(p)))
        zp.append(tuple(fresh(f"z_{i + 1},{j + 1}") for j in range(p)))
    edges = list(g.edges())
    for path in [gp, *xp, *yp, *zp]:
        edges += list(zip(path, path[1:]))
    for i, part in enumerate(cliques):
        edges += [(x[i], v) for v in part] + [(y[i], v) for v in part]
        edges += [(x[i], xp[i][-1]), (gp[-1], xp[i][0])]
        edges += [(y[i], yp[i][0]), (gp[0], yp[i][-1])]
        edges += [(x[i], zp[i][-1]), (y[i], zp[i][0])]
    gprime = Graph.from_edges(next(nxt), edges)
    paths = [gp, *xp, *yp, *zp]
    odd = {path[j] for path in paths for j in range(0, p, 2)}
    even = {path[j] for path in paths for j in range(1, p, 2)}
    return GuardGadget(
        gprime, g, tuple(tuple(sorted(c)) for c in cliques), p, x, y, gp,
        tuple(xp), tuple(yp), tuple(zp), roles,
        frozenset(odd | set(x)), frozenset(even | set(y)),
    )


def guard_yes_witness(gad: GuardGadget, transversal: Sequence[int]) -> list[Move]:
    """x_i -> v_i, shift guard paths (z, x, g, y rounds), then v_i -> y_i."""
    if len(transversal) != gad.k or any(v not in gad.cliques[i] for i, v in enumerate(transversal)):
        raise GadgetError("transversal must pick one vertex from each clique in order")
    if not is_independent(gad.source_graph, transversal):
        raise GadgetError("transversal is not independent")
    moves = [Move(gad.x[i], v) for i, v in enumerate(transversal)]
    rounds = range(gad.p - 2, -1, -2)
    for paths in (gad.z_paths, gad.x_paths, (gad.g_path,), gad.y_paths):
        for j in rounds:
            moves += [Move(path[j], path[j + 1]) for path in paths]
    moves += [Move(v, gad.y[i]) for i, v in enumerate(transversal)]
    bad = verify_sequence(gad.instance(), moves)
    if bad:
        raise AssertionError(f"guard witness failed verification: {bad}")
    return moves


def independent_transversal(g: Graph, parts: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    for pick in itertools.product(*[sorted(p) for p in parts]):
        if is_independent(g, pick):
            return pick
    return None


def guard_counts_ok(gad: GuardGadget, conf) -> bool:
    conf = frozenset(conf)
    half = gad.p // 2
    return all(len(gad.w_set(i) & conf) == 1 for i in range(gad.k)) and all(
        len(conf.intersection(path)) == half for path in gad.guard_paths
    )


@dataclass
class GuardReport:
    input_cycle_free: bool
    gadget_cycle: list[int] | None
    max_is: int | None
    token_count: int
    reachable: bool | None
    transversal: tuple[int, ...] | None
    explored: int = 0
    counts_ok: bool | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_guard_structure(
    gad: GuardGadget, limits: Limits = Limits(), max_is: bool = True, explore: bool = True
) -> GuardReport:
    """Structural checks on a desk-scale gadget; failures are listed, not raised."""
    p = gad.p
    src_free = all(find_induced_cycle(gad.source_graph, ell) is None for ell in range(4, p + 1))
    cyc = None
    for ell in range(4, p + 1):
        cyc = find_induced_cycle(gad.gprime, ell)
        if cyc:
            break
    rep = GuardReport(src_free, cyc, None, gad.token_count, None, independent_transversal(gad.source_graph, gad.cliques))
    if cyc and src_free:
        rep.failures.append(f"induced C{len(cyc)} {cyc} although the input has none")
    elif cyc:
        rep.failures.append(f"input graph has an induced cycle; gadget contains C{len(cyc)}")
    if max_is:
        rep.max_is = max_independent_set_size(gad.gprime)
        if rep.max_is != gad.token_count:
            rep.failures.append(f"maximum independent set {rep.max_is} != token count {gad.token_count}")
    if explore:
        r = bfs_reach(gad.instance(), limits)
        rep.explored = r.explored
        if r.status == "limit":
            rep.failures.append("oracle cap reached")
        else:
            rep.reachable = r.reachable
            if rep.reachable != (rep.transversal is not None):
                rep.failures.append("reachability disagrees with independent-transversal existence")
            try:
                rows = reachable_rows(gad.gprime, gad.source, TS, limits)
                rep.counts_ok = all(guard_counts_ok(gad, row.nonzero()[0].tolist()) for row in rows)
            except LimitExceeded:
                rep.counts_ok = None
                rep.failures.append("reachable set exceeds caps")
            if rep.counts_ok is False:
                rep.failures.append("a reachable configuration breaks the per-path or per-W_i token count")
    return rep


# ---------------------------------------------------------------- bipartite multicolored IS


@dataclass(frozen=True)
class MisGadget:
    gprime: Graph
    source_graph: Graph
    parts: tuple[tuple[int, ...], ...]
    a_copies: tuple[tuple[int, ...], ...]  # A_1..A_2k, entries follow the sorted part order
    b_copies: tuple[tuple[int, ...], ...]
    a_start: tuple[int, ...]
    a_end: tuple[int, ...]
    b_start: tuple[int, ...]
    b_end: tuple[int, ...]
    s_a: int
    e_a: int
    s_b: int
    e_b: int
    orr: dict[int, int]
    roles: dict[int, str]

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def i_s(self) -> frozenset[int]:
        return frozenset(self.a_start) | frozenset(self.b_start) | {self.s_a, self.s_b}

    @property
    def i_e(self) -> frozenset[int]:
        return frozenset(self.a_end) | frozenset(self.b_end) | {self.e_a, self.e_b}

    def instance(self) -> Instance:
        return Instance(self.gprime, self.i_s, self.i_e, TS)

    def copy_of(self, u: int, side: str, index: int) -> int:
        """Copy of source vertex ``u`` inside A_index or B_index (1-based)."""
        sets = self.a_copies if side == "A" else self.b_copies
        block = sets[index - 1]
        return next(c for c in block if self.orr[c] == u)


def build_mis_gadget(g: Graph, parts: Sequence[Sequence[int]]) -> MisGadget:
    _check_partition(g, parts)
    k = len(parts)
    parts = tuple(tuple(sorted(p)) for p in parts)
    roles: dict[int, str] = {}
    orr: dict[int, int] = {}
    nxt = itertools.count()

    def fresh(name):
        v = next(nxt)
        roles[v] = name
        return v

    def copies(side):
        out = []
        for i in range(2 * k):
            block = []
            for u in parts[i // 2]:
                c = fresh(f"{side}_{i + 1}:{u + 1}")
                orr[c] = u
                block.append(c)
            out.append(tuple(block))
        return tuple(out)

    a_cp, b_cp = copies("A"), copies("B")
    a_start = tuple(fresh(f"a_s,{p + 1}") for p in range(2 * k))
    a_end = tuple(fresh(f"a_e,{p + 1}") for p in range(2 * k))
    b_start = tuple(fresh(f"b_s,{p + 1}") for p in range(2 * k))
    b_end = tuple(fresh(f"b_e,{p + 1}") for p in range(2 * k))
    s_a, e_a, s_b, e_b = fresh("s_A"), fresh("e_A"), fresh("s_B"), fresh("e_B")

    edges = []
    for i, j in itertools.product(range(2 * k), repeat=2):
        same = i // 2 == j // 2
        for u, w in itertools.product(a_cp[i], b_cp[j]):
            if (same and orr[u] != orr[w]) or (not same and g.has_edge(orr[u], orr[w])):
                edges.append((u, w))
    for p in range(2 * k):
        b_tail = [w for blk in b_cp[p:] for w in blk]
        a_tail = [u for blk in a_cp[p:] for u in blk]
        edges += [(a_start[p], w) for w in b_tail] + [(a_end[p], w) for w in b_tail]
        edges += [(b_start[p], u) for u in a_tail] + [(b_end[p], u) for u in a_tail]
    edges += [(a, b) for a in (*a_start, s_a) for b in (*b_end, e_b)]
    edges += [(a, b) for a in (*a_end, e_a) for b in (*b_start, s_b)]
    gprime = Graph.from_edges(next(nxt), edges)
    gad = MisGadget(gprime, g, parts, a_cp, b_cp, a_start, a_end, b_start, b_end, s_a, e_a, s_b, e_b, orr, roles)
    if bipartition(gprime) is None:
        raise AssertionError("MIS gadget is not bipartite")
    return gad


def multicolored_independent_set(g: Graph, parts: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    return independent_transversal(g, parts)


def mis_yes_witness(gad: MisGadget, mis: Sequence[int]) -> list[Move]:
    k = gad.k
    if len(mis) != k or any(u not in gad.parts[i] for i, u in enumerate(mis)):
        raise GadgetError("mis must pick one vertex from each part in order")
    if not is_independent(gad.source_graph, mis):
        raise GadgetError("mis is not independent")
    moves = []
    for p in range(1, k + 1):
        u = mis[p - 1]
        for q in (2 * p - 1, 2 * p):
            moves.append(Move(gad.a_start[q - 1], gad.copy_of(u, "B", q)))
        for q in (2 * p - 1, 2 * p):
            moves.append(Move(gad.b_start[q - 1], gad.copy_of(u, "A", q)))
    moves += [Move(gad.s_a, gad.e_b), Move(gad.s_b, gad.e_a)]
    for p in range(k, 0, -1):
        u = mis[p - 1]
        for q in (2 * p, 2 * p - 1):
            moves.append(Move(gad.copy_of(u, "B", q), gad.a_end[q - 1]))
        for q in (2 * p, 2 * p - 1):
            moves.append(Move(gad.copy_of(u, "A", q), gad.b_end[q - 1]))
    bad = verify_sequence(gad.instance(), moves)
    if bad:
        raise AssertionError(f"MIS witness failed verification: {bad}")
    return moves


def is_well_organized(gad: MisGadget, c) -> bool:
    """Well-organised test; the tail condition is accepted under either start-set pairing."""
    c = frozenset(c)
    if not ({gad.s_a, gad.e_b} & c and {gad.s_b, gad.e_a} & c):
        return False
    two_k = 2 * gad.k
    a_cnt = [len(c.intersection(blk)) for blk in gad.a_copies]
    b_cnt = [len(c.intersection(blk)) for blk in gad.b_copies]
    m_a = max((i + 1 for i in range(two_k) if a_cnt[i]), default=0)
    m_b = max((i + 1 for i in range(two_k) if b_cnt[i]), default=0)
    if any(a_cnt[i] != 1 for i in range(m_a)) or any(b_cnt[i] != 1 for i in range(m_b)):
        return False

    def tail(m, start):
        return all(start[p] in c for p in range(m, two_k))

    literal = tail(m_a, gad.a_start) and tail(m_b, gad.b_start)
    crossed = tail(m_b, gad.a_start) and tail(m_a, gad.b_start)
    return literal or crossed


@dataclass
class MisReport:
    mis: tuple[int, ...] | None
    reachable: bool | None
    explored: int
    witness_ok: bool | None
    scoped_well_organized: bool | None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_mis_equivalence(g: Graph, parts: Sequence[Sequence[int]], limits: Limits = Limits()) -> MisReport:
    gad = build_mis_gadget(g, parts)
    mis = multicolored_independent_set(g, gad.parts)
    r = bfs_reach(gad.instance(), limits)
    rep = MisReport(mis, None, r.explored, None, None)
    if r.status == "limit":
        rep.failures.append("oracle cap reached; equivalence not checked")
        return rep
    rep.reachable = r.reachable
    if rep.reachable != (mis is not None):
        rep.failures.append("reachability disagrees with multicolored independent set existence")
    if mis is not None:
        w = mis_yes_witness(gad, mis)
        rep.witness_ok = len(w) == 8 * gad.k + 2
        if not rep.witness_ok:
            rep.failures.append(f"witness length {len(w)} != {8 * gad.k + 2}")
    if r.reachable:
        ends = set(gad.a_end) | set(gad.b_end)
        scoped = [conf for conf in replay(gad.i_s, r.moves) if not conf & ends]
        rep.scoped_well_organized = all(is_well_organized(gad, conf) for conf in scoped)
        if not rep.scoped_well_organized:
            rep.failures.append("a shortest-witness configuration before the end phase is not well-organized")
    return rep
