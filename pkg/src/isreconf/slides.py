"""Constructive token-sliding sequences on bipartite graphs.

Every routine returns a list of :class:`~isreconf.oracle.Move` and checks
its own output by replay before handing it back; a failed construction
raises :class:`SlideError` instead of returning an invalid sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .graph import (
    Bipartition,
    Graph,
    bfs_distances,
    bipartition,
    is_r_independent,
    shortest_path,
)
from .oracle import TS, Instance, Move, check_moves, closer_slides, closest_tokens, is_frozen, replay


class SlideError(RuntimeError):
    """A construction could not proceed; its precondition does not hold."""


def reverse_moves(moves: list[Move]) -> list[Move]:
    return [Move(m.dst, m.src) for m in reversed(moves)]


def _lift(moves: Iterable[Move], old: list[int]) -> list[Move]:
    return [Move(old[m.src], old[m.dst]) for m in moves]


def _restrict(bip: Bipartition, old: list[int]) -> Bipartition:
    return Bipartition(
        frozenset(i for i, v in enumerate(old) if v in bip.left),
        frozenset(i for i, v in enumerate(old) if v in bip.right),
    )


def _require_valid(g: Graph, start, moves: list[Move], what: str):
    bad = check_moves(g, start, moves, TS)
    if bad:
        raise SlideError(f"{what} produced an invalid slide at {bad}")


# ---------------------------------------------------------------- switch_side


def switch_steps(g: Graph, side: frozenset[int], cur: set[int]):
    """Greedy side switch, one slide per yield; mutates ``cur`` as it goes.

    Picks the lowest token on ``side`` with a neighbour ``w`` whose only
    token neighbour it is, and slides it there.
    """
    while True:
        movers = sorted(x for x in cur if x in side)
        if not movers:
            return
        for u in movers:
            w = next((w for w in g.adj[u] if w not in cur and g.nbr_sets[w] & cur == {u}), None)
            if w is not None:
                break
        else:
            raise SlideError(f"no token can leave the side; stuck with {movers}")
        cur.discard(u)
        cur.add(w)
        yield Move(u, w)


def switch_side(g: Graph, bip: Bipartition, s: Iterable[int], from_side: str) -> list[Move]:
    cur = set(s)
    return list(switch_steps(g, bip.side(from_side), cur))


# ---------------------------------------------------------------- move_token_far


def _walk_to(g: Graph, v: int, cur: set[int], z: int, dist: dict[int, int]) -> list[Move]:
    """Slide the uniquely closest token ``z`` down to ``v`` one step at a time."""
    moves = []
    while z != v:
        rest = cur - {z}
        w = next(
            (w for w in g.adj[z] if dist.get(w, math.inf) == dist[z] - 1 and not (g.nbr_sets[w] & rest)),
            None,
        )
        if w is None:
            raise SlideError(f"token at {z} cannot step towards {v}")
        moves.append(Move(z, w))
        cur.discard(z)
        cur.add(w)
        z = w
    return moves


def move_token_far(g: Graph, bip: Bipartition, s: Iterable[int], v: int) -> tuple[list[Move], int]:
    """Bring one closest token onto ``v`` leaving every other token where it was.

    Returns the slides and the vertex ``u`` whose token ended on ``v``.
    """
    s = frozenset(s)
    if v in s or g.nbr_sets[v] & s:
        raise SlideError("N[v] must be token-free")
    d, near = closest_tokens(g, v, s)
    if not near:
        raise SlideError("no token shares a component with v")
    if len({bip.side_of(u) for u in near}) > 1:
        raise SlideError("closest tokens lie on both sides")
    dist = bfs_distances(g, [v])
    cur = set(s)
    alpha: list[Move] = []
    beta: list[Move] = []
    if len(near) == 1:
        origin = walker = next(iter(near))
    elif not is_frozen(g, v, s):
        first = closer_slides(g, v, s)[0]
        beta.append(first)
        cur.discard(first.src)
        cur.add(first.dst)
        origin, walker = first
    else:
        side = bip.side(bip.side_of(next(iter(near))))
        for mv in switch_steps(g, side, cur):
            alpha.append(mv)
            if len(closest_tokens(g, v, cur)[1]) == 1:
                break
        else:
            raise SlideError("switching never isolated a closest token")
        if dist[alpha[-1].dst] < d:
            # the isolating slide already moved a token closer; it opens the walk
            first = alpha.pop()
            beta.append(first)
            origin, walker = first
        else:
            walker = next(iter(closest_tokens(g, v, cur)[1]))
            origin = walker
    beta += _walk_to(g, v, cur, walker, dist)
    moves = alpha + beta + reverse_moves(alpha)
    _require_valid(g, s, moves, "move_token_far")
    if replay(s, moves)[-1] != (s - {origin}) | {v}:
        raise SlideError("move_token_far disturbed another token")
    return moves, origin


# ---------------------------------------------------------------- transform_2independent


def _dedupe_walk(walk: list[int]) -> list[int]:
    out: list[int] = []
    for x in walk:
        if x in out:
            del out[out.index(x) + 1:]
        else:
            out.append(x)
    return out


def _walk_moves(walk: list[int]) -> list[Move]:
    return [Move(a, b) for a, b in zip(walk, walk[1:])]


def transform_2independent(g: Graph, s: Iterable[int], t: Iterable[int]) -> list[Move]:
    """Slides from ``s`` to ``t`` when ``s``, ``t`` and their union are 2-independent.

    Each round resolves the closest pair (u, v) with u in s-t and v in t-s.
    When the chosen shortest path touches the closed neighbourhood of a
    shared token, the shared tokens along it relay: the last one steps to v,
    each earlier one into its successor's place, and u into the first slot.
    """
    s, t = frozenset(s), frozenset(t)
    if len(s) != len(t):
        raise SlideError("sets differ in size")
    for name, x in (("s", s), ("t", t), ("s | t", s | t)):
        if not is_r_independent(g, x, 2):
            raise SlideError(f"{name} is not 2-independent")
    cur = set(s)
    moves: list[Move] = []
    while cur != t:
        common = cur & t
        best = None
        for u in sorted(cur - t):
            dist = bfs_distances(g, [u])
            for v in sorted(t - cur):
                if v in dist and (best is None or dist[v] < best[0]):
                    best = (dist[v], u, v)
        if best is None:
            raise SlideError("remaining tokens and targets are disconnected")
        _, u, v = best
        path = shortest_path(g, u, v)
        near = g.closed_nbhd(common)
        if not any(x in near for x in path):
            step = _walk_moves(path)
        else:
            step = _relay(g, path, common)
        before = set(cur)
        bad = check_moves(g, before, step, TS)
        if bad:
            raise SlideError(f"transform_2independent produced an invalid slide at {bad}")
        for m in step:
            cur.discard(m.src)
            cur.add(m.dst)
        if cur != (before - {u}) | {v}:
            raise SlideError("relay did not resolve the chosen pair")
        moves += step
    return moves


def _relay(g: Graph, path: list[int], common: set[int]) -> list[Move]:
    path = list(path)
    # a shortest path through three neighbours of a shared token goes via the token instead
    for x in sorted(common):
        for i in range(1, len(path) - 1):
            if all(p in g.nbr_sets[x] for p in path[i - 1:i + 2]):
                path[i] = x
    affected: list[int] = []
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for i, p in enumerate(path):
        for x in sorted(common):
            if p == x or p in g.nbr_sets[x]:
                if x not in first:
                    affected.append(x)
                    first[x] = i
                last[x] = i
    segs = []
    a = affected
    segs.append([a[-1]] + path[last[a[-1]]:])
    for i in range(len(a) - 2, -1, -1):
        lo, hi = last[a[i]], first[a[i + 1]]
        if lo > hi:
            raise SlideError("relay neighbourhoods interleave along the path")
        segs.append([a[i]] + path[lo:hi + 1] + [a[i + 1]])
    segs.append(path[:first[a[0]] + 1] + [a[0]])
    moves = []
    for seg in segs:
        walk = [x for j, x in enumerate(seg) if j == 0 or x != seg[j - 1]]
        moves += _walk_moves(_dedupe_walk(walk))
    return moves


# ---------------------------------------------------------------- fat sets


def fat_threshold(k: int, delta: int) -> int:
    return 2 * k * (1 + delta + delta * delta) ** 2


@dataclass(frozen=True)
class FatSetWitness:
    ball_center: int
    radius: int
    ball: frozenset[int]
    interior: frozenset[int]
    two_independent: tuple[int, ...]


def _interior(g: Graph, x: set[int]) -> set[int]:
    outside = [v for v in range(g.n) if v not in x]
    close = bfs_distances(g, outside, 2)
    return {v for v in x if v not in close}


def _centre(h: Graph, comp: list[int]) -> int:
    """Middle vertex of a double-sweep diameter path (exact on trees)."""
    d0 = bfs_distances(h, [comp[0]])
    a = min(d0, key=lambda x: (-d0[x], x))
    da = bfs_distances(h, [a])
    b = min(da, key=lambda x: (-da[x], x))
    path = shortest_path(h, a, b)
    return path[len(path) // 2]


def find_fat_ball(
    g: Graph, k: int, forbidden: Iterable[int] = (), min_size: int | None = None
) -> FatSetWitness | None:
    """A ball of ``g - forbidden`` larger than 2k(1+D+D^2)^2 with a usable interior.

    ``min_size`` replaces that size floor; any ball passing the interior
    checks is a valid input for :func:`route_via_fat`, the floor only
    guarantees one exists.

    The interior is taken in ``g`` (distance at least three from everything
    outside the ball, forbidden vertices included); its component holding
    the centre must be connected and carry 2k vertices pairwise more than
    two apart, extracted greedily in BFS order from the centre.
    """
    forbidden = set(forbidden)
    thr = fat_threshold(k, g.max_degree) if min_size is None else min_size
    h, old = g.remove(forbidden)
    h_new = {x: i for i, x in enumerate(old)}
    for comp in h.components():
        if len(comp) <= thr:
            continue
        c = _centre(h, comp)
        dist = bfs_distances(h, [c])
        for r in range(max(dist.values()) + 1):
            ball = {old[x] for x, dx in dist.items() if dx <= r}
            if len(ball) <= thr:
                continue
            inner = _interior(g, ball)
            centre = old[c]
            if centre not in inner:
                continue
            ig, i_old = g.induced(inner)
            part = {i_old[i] for i in bfs_distances(ig, [i_old.index(centre)])}
            order = sorted(part, key=lambda x: (dist[h_new[x]], x))
            chosen: list[int] = []
            blocked: set[int] = set()
            for x in order:
                if x not in blocked:
                    chosen.append(x)
                    blocked |= set(bfs_distances(g, [x], 2))
                    if len(chosen) == 2 * k:
                        return FatSetWitness(centre, r, frozenset(ball), frozenset(part), tuple(chosen))
    return None


# ---------------------------------------------------------------- route_via_fat


def _migrate(g: Graph, bip: Bipartition, start: frozenset[int], fat: FatSetWitness) -> tuple[list[Move], frozenset[int]]:
    """Slides gathering every token of ``start`` onto the 2-independent set."""
    pool = set(fat.two_independent)
    inner_g, inner_old = g.induced(fat.interior)
    inner_new = {v: i for i, v in enumerate(inner_old)}
    cur = set(start)
    moves: list[Move] = []
    while cur - pool:
        settled = cur & pool
        best = None
        for u in sorted(cur - pool):
            dist = bfs_distances(g, [u])
            for v in sorted(pool):
                if v in dist and (best is None or dist[v] < best[0]):
                    best = (dist[v], u, v)
        if best is None:
            raise SlideError("tokens cannot reach the fat set")
        _, u, v = best
        if v in settled:
            spare = min(pool - settled - {v})
            shifted = (settled - {v}) | {spare}
            local = transform_2independent(
                inner_g, [inner_new[x] for x in settled], [inner_new[x] for x in shifted]
            )
            step = _lift(local, inner_old)
            _require_valid(g, cur, step, "interior shuffle")
            moves += step
            cur = (cur - settled) | shifted
            settled = shifted
        blocked = g.closed_nbhd(settled)
        sub, sub_old = g.remove(blocked)
        sub_new = {x: i for i, x in enumerate(sub_old)}
        comp = next(c for c in sub.components() if sub_new[v] in c)
        cg, c_old = sub.induced(comp)
        c_old = [sub_old[i] for i in c_old]
        c_new = {x: i for i, x in enumerate(c_old)}
        tokens = [c_new[x] for x in cur - pool if x in c_new]
        if not tokens:
            raise SlideError(f"no outside token reaches {v} around the settled tokens")
        local, origin = move_token_far(cg, _restrict(bip, c_old), tokens, c_new[v])
        step = _lift(local, c_old)
        _require_valid(g, cur, step, "migration")
        moves += step
        cur = (cur - {c_old[origin]}) | {v}
    return moves, frozenset(cur)


def route_via_fat(inst: Instance, fat: FatSetWitness) -> list[Move]:
    g = inst.graph
    if inst.variant != TS:
        raise SlideError("route_via_fat is a token-sliding construction")
    if fat.ball & (inst.source | inst.target):
        raise SlideError("fat set meets S or T")
    bip = bipartition(g)
    if bip is None or not g.is_connected():
        raise SlideError("graph must be connected and bipartite")
    to_s, s_end = _migrate(g, bip, inst.source, fat)
    to_t, t_end = _migrate(g, bip, inst.target, fat)
    inner_g, inner_old = g.induced(fat.interior)
    inner_new = {v: i for i, v in enumerate(inner_old)}
    middle = _lift(
        transform_2independent(inner_g, [inner_new[x] for x in s_end], [inner_new[x] for x in t_end]),
        inner_old,
    )
    moves = to_s + middle + reverse_moves(to_t)
    _require_valid(g, inst.source, moves, "route_via_fat")
    if replay(inst.source, moves)[-1] != inst.target:
        raise SlideError("route_via_fat ended away from the target")
    return moves
