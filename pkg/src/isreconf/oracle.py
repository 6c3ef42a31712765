"""Exact reachability over the reconfiguration graph, rigid tokens, and replay checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _search
from .graph import Graph, bfs_distances, is_independent

TS, TJ = "TS", "TJ"
DEFAULT_MAX_CONFIGS = 5_000_000
DEFAULT_MAX_MILLIS = 120_000


class Move(NamedTuple):
    src: int
    dst: int


class LimitExceeded(RuntimeError):
    """The reachable set did not fit under the configured caps."""


@dataclass(frozen=True)
class Limits:
    max_configs: int = DEFAULT_MAX_CONFIGS
    max_millis: int = DEFAULT_MAX_MILLIS


@dataclass(frozen=True)
class Instance:
    graph: Graph
    source: frozenset[int]
    target: frozenset[int]
    variant: str = TS

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(self.source))
        object.__setattr__(self, "target", frozenset(self.target))
        if self.variant not in (TS, TJ):
            raise ValueError(f"variant must be TS or TJ, got {self.variant!r}")
        if len(self.source) != len(self.target) or not self.source:
            raise ValueError("source and target must be nonempty and of equal size")
        for name, s in (("source", self.source), ("target", self.target)):
            if any(not 0 <= v < self.graph.n for v in s):
                raise ValueError(f"{name} has a vertex out of range")
            if not is_independent(self.graph, s):
                raise ValueError(f"{name} is not independent")

    @property
    def k(self) -> int:
        return len(self.source)


@dataclass(frozen=True)
class ReachResult:
    status: str  # "reachable" | "unreachable" | "limit"
    moves: tuple[Move, ...] | None
    explored: int
    shortest: bool = True

    @property
    def reachable(self) -> bool:
        return self.status == "reachable"


@dataclass(frozen=True)
class RigidReport:
    rigid: frozenset[int]
    explored: int

    @property
    def unlocked(self) -> bool:
        return not self.rigid


@dataclass(frozen=True)
class Violation:
    index: int
    reason: str

    def __str__(self):
        return f"move {self.index}: {self.reason}"


def legal_moves(g: Graph, c: Iterable[int], variant: str = TS) -> list[Move]:
    c = frozenset(c)
    out = []
    for u in sorted(c):
        rest = c - {u}
        dom = g.closed_nbhd(rest)
        dests = g.adj[u] if variant == TS else range(g.n)
        out.extend(Move(u, w) for w in dests if w != u and w not in dom)
    return out


def apply_move(c: frozenset[int], mv: Move) -> frozenset[int]:
    return (c - {mv.src}) | {mv.dst}


def replay(start: Iterable[int], moves: Sequence[Move]) -> list[frozenset[int]]:
    confs = [frozenset(start)]
    for mv in moves:
        confs.append(apply_move(confs[-1], mv))
    return confs


def check_moves(g: Graph, start: Iterable[int], moves: Sequence[Move], variant: str = TS) -> Violation | None:
    """First illegal move in ``moves`` from ``start``; None when all are legal."""
    cur = set(start)
    for i, (u, w) in enumerate(moves):
        if u not in cur:
            return Violation(i, f"no token on {u}")
        if not 0 <= w < g.n or w in cur:
            return Violation(i, f"destination {w} unavailable")
        if variant == TS and not g.has_edge(u, w):
            return Violation(i, f"{u}-{w} is not an edge")
        cur.discard(u)
        if g.nbr_sets[w] & cur:
            return Violation(i, f"{w} adjacent to a token")
        cur.add(w)
    return None


def verify_sequence(inst: Instance, moves: Sequence[Move]) -> Violation | None:
    bad = check_moves(inst.graph, inst.source, moves, inst.variant)
    if bad:
        return bad
    final = replay(inst.source, moves)[-1]
    if final != inst.target:
        return Violation(len(moves), "final configuration differs from target")
    return None


def _search_instance(g, start, target, variant, limits: Limits):
    return _search.search(
        g.adj, g.n, sorted(start), sorted(target) if target is not None else None,
        variant == TS, limits.max_configs, limits.max_millis / 1000.0,
    )


def bfs_reach(inst: Instance, limits: Limits = Limits()) -> ReachResult:
    out = _search_instance(inst.graph, inst.source, inst.target, inst.variant, limits)
    if out.status == _search.FOUND:
        moves = tuple(Move(u, w) for u, w in out.path_moves(out.found))
        return ReachResult("reachable", moves, out.count)
    if out.status == _search.EXHAUSTED:
        return ReachResult("unreachable", None, out.count)
    return ReachResult("limit", None, out.count)


def reachable_rows(g: Graph, start: Iterable[int], variant: str = TS, limits: Limits = Limits()) -> np.ndarray:
    """Membership matrix of every configuration reachable from ``start``."""
    out = _search_instance(g, start, None, variant, limits)
    if out.status != _search.EXHAUSTED:
        raise LimitExceeded(f"reachable set exceeds caps after {out.count} configurations")
    return _search.decode_rows(out.store, g.n)


def reachable_set(g: Graph, start: Iterable[int], variant: str = TS, limits: Limits = Limits()) -> list[frozenset[int]]:
    rows = reachable_rows(g, start, variant, limits)
    return [frozenset(np.nonzero(r)[0].tolist()) for r in rows]


def rigid_tokens(g: Graph, i: Iterable[int], variant: str = TS, limits: Limits = Limits()) -> RigidReport:
    i = frozenset(i)
    if not i:
        return RigidReport(frozenset(), 1)
    rows = reachable_rows(g, i, variant, limits)
    common = np.logical_and.reduce(rows, axis=0)
    return RigidReport(frozenset(np.nonzero(common)[0].tolist()), len(rows))


def closest_tokens(g: Graph, v: int, s: Iterable[int]) -> tuple[float, frozenset[int]]:
    s = frozenset(s)
    dist = bfs_distances(g, [v])
    ds = [dist[u] for u in s if u in dist]
    if not ds:
        return math.inf, frozenset()
    d = min(ds)
    return d, frozenset(u for u in s if dist.get(u) == d)


def closer_slides(g: Graph, v: int, s: Iterable[int]) -> list[Move]:
    """Slides of a closest token onto a neighbour strictly nearer to ``v``."""
    s = frozenset(s)
    dist = bfs_distances(g, [v])
    _, near = closest_tokens(g, v, s)
    out = []
    for u in sorted(near):
        rest = s - {u}
        for w in g.adj[u]:
            if dist.get(w, math.inf) < dist[u] and w not in s and not (g.nbr_sets[w] & rest):
                out.append(Move(u, w))
    return out


def is_frozen(g: Graph, v: int, s: Iterable[int]) -> bool:
    _, near = closest_tokens(g, v, s)
    return len(near) >= 2 and not closer_slides(g, v, s)
