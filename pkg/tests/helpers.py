"""Independent reference implementations and corpus builders shared by the tests."""

from __future__ import annotations

import itertools
from collections import deque

import networkx as nx
from hypothesis import strategies as st

from isreconf.graph import Graph


def ref_independent(adj, s) -> bool:
    s = set(s)
    return all(not (set(adj[v]) & s) for v in s)


def ref_neighbors(adj, conf, sliding):
    """Successor configurations, built from scratch without the package's move code."""
    n = len(adj)
    conf = frozenset(conf)
    out = []
    for u in sorted(conf):
        rest = conf - {u}
        for w in (adj[u] if sliding else range(n)):
            if w in conf:
                continue
            if any(x in rest for x in adj[w]):
                continue
            out.append(rest | {w})
    return out


def ref_bfs(adj, start, target, sliding):
    """Shortest distance from start to target, or None if unreachable."""
    start, target = frozenset(start), frozenset(target)
    dist = {start: 0}
    q = deque([start])
    while q:
        c = q.popleft()
        if c == target:
            return dist[c]
        for d in ref_neighbors(adj, c, sliding):
            if d not in dist:
                dist[d] = dist[c] + 1
                q.append(d)
    return None


def ref_component(adj, start, sliding) -> set[frozenset]:
    start = frozenset(start)
    seen = {start}
    q = deque([start])
    while q:
        for d in ref_neighbors(adj, q.popleft(), sliding):
            if d not in seen:
                seen.add(d)
                q.append(d)
    return seen


def independent_sets(g: Graph, k: int) -> list[tuple[int, ...]]:
    return [s for s in itertools.combinations(range(g.n), k) if ref_independent(g.adj, s)]


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_nx(h: nx.Graph) -> Graph:
    idx = {v: i for i, v in enumerate(sorted(h.nodes))}
    return Graph.from_edges(len(idx), [(idx[a], idx[b]) for a, b in h.edges])


def _dedupe(graphs: list[nx.Graph]) -> list[nx.Graph]:
    buckets: dict[str, list[nx.Graph]] = {}
    for h in graphs:
        key = nx.weisfeiler_lehman_graph_hash(h, iterations=3)
        bucket = buckets.setdefault(key, [])
        if not any(nx.is_isomorphic(h, o) for o in bucket):
            bucket.append(h)
    return [h for b in buckets.values() for h in b]


def _grow(nmax: int, ok_attach) -> dict[int, list[nx.Graph]]:
    """All connected graphs up to isomorphism reachable by adding non-cut vertices.

    ``ok_attach(h, subset)`` says whether a new vertex may join ``subset``;
    every connected graph has a non-cut vertex, so the family is complete
    whenever it is closed under deleting such vertices.
    """
    first = nx.Graph()
    first.add_node(0)
    levels = {1: [first]}
    for n in range(2, nmax + 1):
        cand = []
        for h in levels[n - 1]:
            nodes = sorted(h.nodes)
            for r in range(1, len(nodes) + 1):
                for sub in itertools.combinations(nodes, r):
                    if ok_attach(h, sub):
                        h2 = h.copy()
                        h2.add_edges_from((n - 1, x) for x in sub)
                        cand.append(h2)
        levels[n] = _dedupe(cand)
    return levels


def connected_girth5_graphs(nmax: int) -> dict[int, list[Graph]]:
    def ok(h, sub):
        if len(sub) < 2:
            return True
        for a, b in itertools.combinations(sub, 2):
            try:
                if nx.shortest_path_length(h, a, b) < 3:
                    return False
            except nx.NetworkXNoPath:
                pass
        return True

    return {n: [from_nx(h) for h in hs] for n, hs in _grow(nmax, ok).items()}


def connected_bipartite_graphs(nmax: int) -> dict[int, list[Graph]]:
    def ok(h, sub):
        colour = nx.bipartite.color(h)
        return len({colour[x] for x in sub}) == 1

    return {n: [from_nx(h) for h in hs] for n, hs in _grow(nmax, ok).items()}


@st.composite
def small_graphs(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def trees(draw, min_n=2, max_n=14):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    return Graph.from_edges(n, [(i, p) for i, p in zip(range(1, n), parents)])


@st.composite
def graph_with_sets(draw, graphs=None, max_k=3):
    g = draw(graphs if graphs is not None else small_graphs(2, 8))
    k = draw(st.integers(1, max_k))
    sets = independent_sets(g, k)
    if not sets:
        sets = independent_sets(g, 1)
    s = draw(st.sampled_from(sets))
    t = draw(st.sampled_from([x for x in sets if len(x) == len(s)]))
    return g, s, t


@st.composite
def connected_bipartite(draw, min_n=2, max_n=12, extra=6):
    """Random tree plus a few edges joining opposite colour classes."""
    g = draw(trees(min_n, max_n))
    colour = {0: 0}
    for v in range(1, g.n):
        p = next(u for u in g.adj[v] if u < v)
        colour[v] = 1 - colour[p]
    edges = set(g.edges())
    for _ in range(draw(st.integers(0, extra))):
        u = draw(st.integers(0, g.n - 1))
        w = draw(st.integers(0, g.n - 1))
        if colour[u] != colour[w]:
            edges.add((min(u, w), max(u, w)))
    return Graph.from_edges(g.n, sorted(edges))
