"""Simple undirected graphs, the edge-list text format, and structural predicates."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

INF = math.inf


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1.

    ``adj`` holds one sorted tuple of neighbours per vertex.  Build instances
    with :meth:`from_edges` unless the adjacency is already canonical.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), tuple(labels) if labels else None)

    @cached_property
    def nbr_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adj)

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbr_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def closed_nbhd(self, vs: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for v in vs:
            out.add(v)
            out.update(self.adj[v])
        return out

    def induced(self, keep: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``keep``; returns it with the new->old vertex map."""
        old = sorted(set(keep))
        new_of = {v: i for i, v in enumerate(old)}
        edges = [(new_of[u], new_of[v]) for u in old for v in self.adj[u] if v in new_of and u < v]
        labels = [self.labels[v] for v in old] if self.labels else None
        return Graph.from_edges(len(old), edges, labels), old

    def remove(self, drop: Iterable[int]) -> tuple["Graph", list[int]]:
        drop = set(drop)
        return self.induced(v for v in range(self.n) if v not in drop)

    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            q = deque([s])
            while q:
                u = q.popleft()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        q.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1


# ---------------------------------------------------------------- text format


def parse_graph(text: str) -> Graph:
    g, extra = parse_graph_lines(text.splitlines())
    if extra:
        lineno, line = extra[0]
        raise ParseError(lineno, f"unexpected line {line!r}")
    return g


def parse_graph_lines(lines: Sequence[str]) -> tuple[Graph, list[tuple[int, str]]]:
    """Parse the graph part of a file.

    Lines that are neither comments, the header nor edges are handed back
    with their 1-based line numbers so callers can read their own records.
    """
    n = None
    edges = []
    extra = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate header")
            if len(parts) != 4 or parts[1] != "edge":
                raise ParseError(lineno, "malformed header, expected 'p edge <n> <m>'")
            try:
                n, _m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(lineno, "malformed header, expected integers") from None
            if n < 0 or _m < 0:
                raise ParseError(lineno, "negative count in header")
        elif parts[0] == "e":
            if n is None:
                raise ParseError(lineno, "edge before header")
            if len(parts) != 3:
                raise ParseError(lineno, "malformed edge line")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(lineno, "malformed edge line") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(lineno, f"vertex index out of range 1..{n}")
            if u == v:
                raise ParseError(lineno, f"self-loop at vertex {u}")
            edges.append((u - 1, v - 1))
        else:
            extra.append((lineno, line))
    if n is None:
        raise ParseError(len(lines) + 1, "missing header 'p edge <n> <m>'")
    return Graph.from_edges(n, edges), extra


def serialize_graph(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- distances


def bfs_distances(g: Graph, sources: Iterable[int], limit: float = INF) -> dict[int, int]:
    dist = {}
    q = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            q.append(s)
    while q:
        u = q.popleft()
        d = dist[u]
        if d >= limit:
            continue
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = d + 1
                q.append(w)
    return dist


def distance(g: Graph, u: int, v: int) -> float:
    return bfs_distances(g, [u]).get(v, INF)


def layers(g: Graph, v: int, r: int) -> list[list[int]]:
    """``[N^0(v), N^1(v), ..., N^r(v)]`` with each layer sorted."""
    out: list[list[int]] = [[] for _ in range(r + 1)]
    for u, d in bfs_distances(g, [v], r).items():
        out[d].append(u)
    for layer in out:
        layer.sort()
    return out


def ball(g: Graph, v: int, r: int) -> set[int]:
    return set(bfs_distances(g, [v], r))


def is_independent(g: Graph, s: Iterable[int]) -> bool:
    s = set(s)
    return all(not (g.nbr_sets[u] & s) for u in s)


def is_r_independent(g: Graph, s: Iterable[int], r: int) -> bool:
    s = set(s)
    for v in s:
        near = bfs_distances(g, [v], r)
        if any(u in s for u in near if u != v):
            return False
    return True


def shortest_path(g: Graph, u: int, v: int, allowed: set[int] | None = None) -> list[int] | None:
    """Lexicographically smallest shortest u-v path, optionally inside ``allowed``."""
    if allowed is not None and (u not in allowed or v not in allowed):
        return None
    dist = {v: 0}
    q = deque([v])
    while q:
        x = q.popleft()
        for w in g.adj[x]:
            if w not in dist and (allowed is None or w in allowed):
                dist[w] = dist[x] + 1
                q.append(w)
    if u not in dist:
        return None
    path = [u]
    while path[-1] != v:
        x = path[-1]
        path.append(min(w for w in g.adj[x] if dist.get(w) == dist[x] - 1))
    return path


# ---------------------------------------------------------------- structure


@dataclass(frozen=True)
class Bipartition:
    left: frozenset[int]
    right: frozenset[int]

    def side_of(self, v: int) -> str:
        return "L" if v in self.left else "R"

    def side(self, name: str) -> frozenset[int]:
        return self.left if name == "L" else self.right


def bipartition(g: Graph) -> Bipartition | None:
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for w in g.adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    q.append(w)
                elif color[w] == color[u]:
                    return None
    return Bipartition(
        frozenset(v for v in range(g.n) if color[v] == 0),
        frozenset(v for v in range(g.n) if color[v] == 1),
    )


def is_induced_cycle(g: Graph, cyc: Sequence[int]) -> bool:
    ell = len(cyc)
    if ell < 3 or len(set(cyc)) != ell:
        return False
    for i, j in combinations(range(ell), 2):
        consecutive = j == i + 1 or (i == 0 and j == ell - 1)
        if g.has_edge(cyc[i], cyc[j]) != consecutive:
            return False
    return True


def find_induced_cycle(g: Graph, ell: int) -> list[int] | None:
    """An induced cycle on exactly ``ell`` vertices, or None.

    Depth-first growth of induced paths anchored at their smallest vertex;
    a new vertex must avoid every non-terminal path vertex's neighbourhood.
    """
    if ell < 3:
        raise ValueError("cycle length must be at least 3")
    nb = g.nbr_sets

    def extend(path: list[int]):
        start, last = path[0], path[-1]
        if len(path) == ell:
            return list(path) if start in nb[last] else None
        for w in g.adj[last]:
            if w <= start or w in path:
                continue
            if len(path) < ell - 1 and start in nb[w] and len(path) > 1:
                continue
            if len(path) == ell - 1 and start not in nb[w]:
                continue
            # w must see no internal path vertex except ``last``
            if any(x in nb[w] for x in path[1:-1]):
                continue
            path.append(w)
            found = extend(path)
            path.pop()
            if found:
                return found
        return None

    for s in range(g.n):
        for w in g.adj[s]:
            if w <= s:
                continue
            found = extend([s, w])
            if found:
                return found
    return None


def girth(g: Graph) -> float:
    best = INF
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        q = deque([s])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in g.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def is_sparse(g: Graph, eps: float) -> bool:
    return g.m <= g.n ** (2 - eps)


@dataclass(frozen=True)
class ClassReport:
    bipartite: Bipartition | None
    girth: float
    induced_cycle_free: dict[int, bool]
    max_degree: int
    sparsity: dict[float, bool]

    @property
    def c3c4_free(self) -> bool:
        return self.girth >= 5

    @property
    def bipartite_c4_free(self) -> bool:
        return self.bipartite is not None and self.girth >= 6


def classify(g: Graph, p: int = 5, eps_list: Sequence[float] = (1.0,)) -> ClassReport:
    if p < 3:
        raise ValueError("p must be at least 3")
    bip = bipartition(g)
    gi = girth(g)
    free = {}
    for ell in range(3, p + 1):
        if ell % 2 and bip is not None:
            free[ell] = True
        elif ell == 3:
            free[ell] = gi > 3
        else:
            free[ell] = find_induced_cycle(g, ell) is None
    return ClassReport(bip, gi, free, g.max_degree, {e: is_sparse(g, e) for e in eps_list})


# ---------------------------------------------------------------- named graphs


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star_graph(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def grid_graph(rows: int, cols: int) -> Graph:
    idx = lambda r, c: r * cols + c
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return Graph.from_edges(rows * cols, edges)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def heawood_graph() -> Graph:
    """Incidence graph of the Fano plane: bipartite, cubic, girth 6."""
    lines = [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 0), (5, 6, 1), (6, 0, 2)]
    return Graph.from_edges(14, [(p, 7 + i) for i, line in enumerate(lines) for p in line])


def spider_graph(legs: int, length: int) -> Graph:
    """Centre 0 with ``legs`` paths of ``length`` vertices; leg j occupies 1+j*length..."""
    edges = []
    for j in range(legs):
        prev = 0
        for t in range(length):
            v = 1 + j * length + t
            edges.append((prev, v))
            prev = v
    return Graph.from_edges(1 + legs * length, edges)


def binary_tree(depth: int) -> Graph:
    n = 2 ** (depth + 1) - 1
    return Graph.from_edges(n, [((i - 1) // 2, i) for i in range(1, n)])
