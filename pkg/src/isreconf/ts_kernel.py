"""Token Sliding kernels on bipartite graphs and the high-degree always-yes rule."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Bipartition, ClassReport, Graph, bfs_distances, bipartition, classify, layers, shortest_path
from .oracle import TS, Instance, Limits, Move, bfs_reach, check_moves, closest_tokens, rigid_tokens, verify_sequence
from .slides import (
    SlideError,
    _lift,
    _restrict,
    fat_threshold,
    find_fat_ball,
    move_token_far,
    reverse_moves,
    route_via_fat,
    switch_steps,
)
from .tj_kernel import KernelOutcome, RouteError


class StageError(RuntimeError):
    def __init__(self, stage: int, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


# ---------------------------------------------------------------- rigid preprocessing


@dataclass(frozen=True)
class Unlocked:
    """Instance after deleting N[R]; ``old`` maps reduced vertices back."""

    graph: Graph
    old: list[int]
    source: frozenset[int]
    target: frozenset[int]
    rigid: frozenset[int]
    parts: tuple[tuple[tuple[int, ...], frozenset[int], frozenset[int]], ...]


def preprocess_rigid(inst: Instance, limits: Limits = Limits()) -> KernelOutcome | Unlocked:
    if inst.variant != TS:
        raise RouteError("rigid preprocessing applies to token sliding")
    g = inst.graph
    rs = rigid_tokens(g, inst.source, TS, limits).rigid
    rt = rigid_tokens(g, inst.target, TS, limits).rigid
    if rs != rt:
        return KernelOutcome("no", trace=("rigid-mismatch",), reason="rigid mismatch")
    h, old = g.remove(g.closed_nbhd(rs))
    new = {v: i for i, v in enumerate(old)}
    s = frozenset(new[v] for v in inst.source - rs)
    t = frozenset(new[v] for v in inst.target - rs)
    parts = []
    for comp in h.components():
        cs, ct = s.intersection(comp), t.intersection(comp)
        if len(cs) != len(ct):
            return KernelOutcome("no", trace=("rigid-ok", "component-count-mismatch"), reason="component token counts differ")
        if cs:
            parts.append((tuple(comp), frozenset(cs), frozenset(ct)))
    return Unlocked(h, old, s, t, rs, tuple(parts))


# ---------------------------------------------------------------- bounded degree


def bounded_degree_bound(k: int, delta: int) -> int:
    return 2 * k + 2 * k * delta * fat_threshold(k, delta)


def kernelize_ts_bounded_degree(inst: Instance, bip: Bipartition | None = None) -> KernelOutcome:
    g = inst.graph
    bip = bip or bipartition(g)
    if bip is None:
        raise RouteError("bounded-degree kernel needs a bipartite graph")
    fat = find_fat_ball(g, inst.k, inst.source | inst.target)
    if fat is not None:
        moves = route_via_fat(inst, fat)
        return KernelOutcome("yes", tuple(moves), trace=("fat-ball",))
    bound = bounded_degree_bound(inst.k, g.max_degree)
    if g.n > bound:
        raise AssertionError(f"no fat ball yet {g.n} > {bound} vertices")
    return KernelOutcome("reduced", instance=inst, size_bound=bound, trace=("fat-ball:pass",))


# ---------------------------------------------------------------- high degree


@dataclass(frozen=True)
class HighDegDecomposition:
    center: int
    pendant: int | None
    n1: tuple[int, ...]
    n2_parent: dict[int, int]
    n_u: dict[int, tuple[int, ...]]
    n3: tuple[int, ...]
    m_small: frozenset[int]
    m_big: frozenset[int]
    k: int

    @property
    def ball3(self) -> frozenset[int]:
        extra = {self.center} | ({self.pendant} if self.pendant is not None else set())
        return frozenset(set(self.n1) | set(self.n2_parent) | set(self.n3) | extra)


def highdeg_threshold(k: int) -> int:
    return k * k + k + 1


def build_highdeg_decomposition(g: Graph, v: int, k: int, pendant: int | None = None) -> HighDegDecomposition:
    if g.degree(v) < highdeg_threshold(k):
        raise ValueError(f"degree {g.degree(v)} of {v} is below k^2+k+1 = {highdeg_threshold(k)}")
    if pendant is None:
        pendant = next((x for x in g.adj[v] if g.degree(x) == 1), None)
    lay = layers(g, v, 3) + [[], [], []]
    n1 = tuple(x for x in lay[1] if x != pendant)
    n1set = set(n1)
    parent = {}
    for y in lay[2]:
        ups = [x for x in g.adj[y] if x in n1set]
        if len(ups) != 1:
            raise ValueError(f"C4 through {v}, {ups[0]}, {y}, {ups[1]}")
        parent[y] = ups[0]
    n_u = {x: tuple(y for y in g.adj[x] if y != v) for x in n1}
    small, big = set(), set()
    for z in lay[3]:
        touched = [parent[y] for y in g.adj[z] if y in parent]
        if len(set(touched)) != len(touched):
            raise ValueError(f"C4 through {z} and two vertices of one N2 set")
        (big if len(touched) >= k + 1 else small).add(z)
    return HighDegDecomposition(v, pendant, n1, parent, n_u, tuple(lay[3]), frozenset(small), frozenset(big), k)


class _Run:
    """Mutable token state with slide bookkeeping for the normalisation stages."""

    def __init__(self, g: Graph, bip: Bipartition, dec: HighDegDecomposition, s):
        self.g, self.bip, self.dec = g, bip, dec
        self.cur = set(s)
        self.moves: list[Move] = []

    def apply(self, moves, stage):
        bad = check_moves(self.g, self.cur, moves, TS)
        if bad:
            raise StageError(stage, f"invalid slide {bad}")
        for m in moves:
            self.cur.discard(m.src)
            self.cur.add(m.dst)
        self.moves += list(moves)

    def park(self, tokens, stage) -> list[Move]:
        """Step each token of N1 in ``tokens`` onto a private N2 neighbour."""
        out = []
        for q in sorted(tokens):
            p = next((y for y in self.dec.n_u[q] if self.g.nbr_sets[y] & self.cur == {q}), None)
            if p is None:
                raise StageError(stage, f"token on {q} has nowhere to park")
            self.apply([Move(q, p)], stage)
            out.append(Move(q, p))
        return out

    def far(self, v, stage):
        try:
            seq, origin = move_token_far(self.g, self.bip, self.cur, v)
        except SlideError as exc:
            raise StageError(stage, str(exc)) from exc
        self.apply(seq, stage)
        return origin

    def switch(self, side, stage, stop=None, graph=None, old=None):
        """Greedy side switch (optionally inside a subgraph) until ``stop`` holds."""
        g = graph or self.g
        new = {x: i for i, x in enumerate(old)} if old else None
        local = {new[x] for x in self.cur if x in new} if new else self.cur.copy()
        side_local = frozenset(new[x] for x in side if x in new) if new else side
        try:
            for mv in switch_steps(g, side_local, local):
                real = Move(old[mv.src], old[mv.dst]) if old else mv
                self.apply([real], stage)
                if stop is not None and stop():
                    return True
        except SlideError as exc:
            if stop is None:
                raise StageError(stage, str(exc)) from exc
            return False
        return stop is None


def _stage1(run: _Run):
    d, g = run.dec, run.g
    v = d.center
    own = run.bip.side_of(v)
    other = "R" if own == "L" else "L"
    run.switch(run.bip.side(other), 1)
    if v in run.cur:
        for x in d.n1:
            if d.n_u[x] and not (set(d.n_u[x]) & run.cur):
                run.apply([Move(v, x), Move(x, d.n_u[x][0])], 1)
                break
        else:
            raise StageError(1, "no free path v, x, y to evict the centre token")


def _stage2(run: _Run):
    own = run.bip.side_of(run.dec.center)
    run.switch(run.bip.side(own), 2)


def _stage3(run: _Run):
    d, g = run.dec, run.g
    while run.cur & d.m_big:
        w = min(run.cur & d.m_big)
        for x in g.adj[w]:
            if x not in d.n2_parent:
                continue
            z = d.n2_parent[x]
            if g.nbr_sets[x] & run.cur == {w} and z not in run.cur and not (g.nbr_sets[z] & run.cur):
                run.apply([Move(w, x), Move(x, z)], 3)
                break
        else:
            raise StageError(3, f"no free route from {w} into N1")


def _stage4(run: _Run):
    d, g = run.dec, run.g
    n1 = set(d.n1)
    while run.cur & d.m_small:
        a_tokens = sorted(run.cur & d.m_small)
        c_set = {d.n2_parent[y] for a in a_tokens for y in g.adj[a] if y in d.n2_parent}
        # phase one: clear the N1 vertices whose N2 sets touch A
        while run.cur & c_set:
            parked = run.park(run.cur & (n1 - c_set), 4)
            u = next((x for x in d.n1 if x not in c_set and not (g.closed_nbhd([x]) & run.cur)), None)
            if u is None:
                raise StageError(4, "no free landing vertex outside C")
            run.far(u, 4)
            run.apply(reverse_moves(parked), 4)
        # phase two: pull one A token through C and v into N1 - C
        a = a_tokens[0]
        parked = run.park(run.cur & n1, 4)
        c = next(
            (
                x for x in sorted(c_set)
                if set(d.n_u[x]) & set(g.adj[a]) and not (g.closed_nbhd([x]) & run.cur)
            ),
            None,
        )
        if c is None:
            raise StageError(4, f"no free C vertex next to the N2 neighbours of {a}")
        run.far(c, 4)
        origins = {m.src for m in parked}
        u = next(
            (x for x in d.n1 if x not in c_set and x not in origins and not (g.closed_nbhd([x]) & (run.cur - {c}))),
            None,
        )
        if u is None:
            raise StageError(4, "no free N1 vertex to receive the token")
        run.apply([Move(c, d.center), Move(d.center, u)], 4)
        run.apply(reverse_moves(parked), 4)


def _swap_in_n1(run: _Run, x: int, u: int, stage: int):
    """Move the token on ``x`` in N1 to ``u`` in N1 through the centre."""
    others = run.cur & set(run.dec.n1) - {x}
    parked = run.park(others, stage)
    run.apply([Move(x, run.dec.center), Move(run.dec.center, u)], stage)
    run.apply(reverse_moves(parked), stage)


def _direct(run: _Run, u: int, w: int):
    """Case of a uniquely closest outside token ``w`` heading for ``u`` in N1."""
    d, g = run.dec, run.g
    x_set = run.cur & d.ball3
    path = shortest_path(g, w, u)
    guard = g.closed_nbhd(x_set)
    hit = next((i for i, p in enumerate(path) if p in guard), None)
    if hit is None:
        run.apply([Move(a, b) for a, b in zip(path, path[1:])], 6)
        return
    x = min(t for t in x_set if path[hit] == t or path[hit] in g.nbr_sets[t])
    _swap_in_n1(run, x, u, 6)
    walk = path[: hit + 1] + ([x] if path[hit] != x else [])
    run.apply([Move(a, b) for a, b in zip(walk, walk[1:])], 6)


def _stage6(run: _Run):
    d, g = run.dec, run.g
    n1 = set(d.n1)
    inner = {d.center} | n1 | set(d.n2_parent) | ({d.pendant} if d.pendant is not None else set())
    sub, sub_old = g.remove(inner)
    while run.cur - d.ball3:
        rest = run.cur - d.ball3
        best = None
        for w in sorted(rest):
            dist = bfs_distances(g, [w])
            for u in d.n1:
                if u not in run.cur and u in dist and (best is None or (dist[u], u, w) < best):
                    best = (dist[u], u, w)
        if best is None:
            raise StageError(6, "outside tokens cannot reach N1")
        _, u, w = best
        near = closest_tokens(g, u, rest)[1]
        if len(near) == 1:
            _direct(run, u, w)
            continue
        before = len(run.cur & n1)

        def settled():
            inside = run.cur & set(d.n3)
            if len(inside & d.m_small) == 1 or len(inside & d.m_big) == 1:
                return True
            return not inside and len(closest_tokens(g, u, run.cur - d.ball3)[1]) == 1

        side = run.bip.side(run.bip.side_of(next(iter(near))))
        if not run.switch(side, 6, stop=settled, graph=sub, old=sub_old):
            raise StageError(6, "switching outside B(v,2) never produced a usable configuration")
        inside = run.cur & set(d.n3)
        if len(inside & d.m_small) == 1:
            _stage4(run)
        elif len(inside & d.m_big) == 1:
            _stage3(run)
        else:
            rest = run.cur - d.ball3
            _direct(run, u, next(iter(closest_tokens(g, u, rest)[1])))
        if len(run.cur & n1) <= before:
            raise StageError(6, "no progress towards N1")


STAGE_CHECKS = {
    1: lambda d, c: c & d.ball3 <= set(d.n2_parent),
    2: lambda d, c: c & d.ball3 <= set(d.n1) | set(d.n3),
    3: lambda d, c: c & d.ball3 <= set(d.n1) | d.m_small,
    4: lambda d, c: c & d.ball3 <= set(d.n1),
    6: lambda d, c: c <= set(d.n1),
}


@dataclass
class NormalizeResult:
    moves: list[Move]
    final: frozenset[int]
    stages: list[tuple[int, list[Move], frozenset[int]]] = field(default_factory=list)


def highdeg_normalize(g: Graph, bip: Bipartition, dec: HighDegDecomposition, s) -> NormalizeResult:
    run = _Run(g, bip, dec, s)
    out = NormalizeResult([], frozenset())
    for stage, fn in ((1, _stage1), (2, _stage2), (3, _stage3), (4, _stage4), (6, _stage6)):
        start = len(run.moves)
        fn(run)
        conf = frozenset(run.cur)
        if not STAGE_CHECKS[stage](dec, conf):
            raise StageError(stage, f"containment fails for {sorted(conf)}")
        out.stages.append((stage, run.moves[start:], conf))
    out.moves = run.moves
    out.final = frozenset(run.cur)
    return out


def highdeg_connect(g: Graph, dec: HighDegDecomposition, s5, t5) -> list[Move]:
    bip = bipartition(g)
    run = _Run(g, bip, dec, s5)
    t5 = frozenset(t5)
    while run.cur != t5:
        u, w = min(run.cur - t5), min(t5 - run.cur)
        parked = run.park(run.cur - {u}, 5)
        run.apply([Move(u, dec.center), Move(dec.center, w)], 5)
        run.apply(reverse_moves(parked), 5)
    return run.moves


def normalize_pendants(g: Graph, keep) -> tuple[Graph, list[int]]:
    """Drop surplus pendant neighbours; pendants in ``keep`` always stay."""
    keep = set(keep)
    drop = set()
    for x in range(g.n):
        pend = [y for y in g.adj[x] if g.degree(y) == 1 and g.degree(x) > 1]
        held = [y for y in pend if y in keep] or pend[:1]
        drop |= set(pend) - set(held)
    return g.remove(drop)


@dataclass(frozen=True)
class HighDegPlan:
    """Everything the always-yes witness is assembled from, in normalised numbering."""

    graph: Graph
    old: list[int]
    decomposition: HighDegDecomposition
    source_run: NormalizeResult
    target_run: NormalizeResult
    connect: list[Move]

    @property
    def moves(self) -> list[Move]:
        local = self.source_run.moves + self.connect + reverse_moves(self.target_run.moves)
        return _lift(local, self.old)


def highdeg_plan(inst: Instance) -> HighDegPlan | None:
    g0 = inst.graph
    g, old = normalize_pendants(g0, inst.source | inst.target)
    new = {x: i for i, x in enumerate(old)}
    k = inst.k
    v = next((x for x in range(g.n) if g.degree(x) >= highdeg_threshold(k)), None)
    if v is None:
        return None
    bip = bipartition(g)
    if bip is None:
        raise RouteError("high-degree rule needs a bipartite graph")
    st = {new[x] for x in inst.source | inst.target}
    pend = [x for x in g.adj[v] if g.degree(x) == 1]
    pendant = min([x for x in pend if x in st] or pend) if pend else None
    dec = build_highdeg_decomposition(g, v, k, pendant)
    ns = highdeg_normalize(g, bip, dec, [new[x] for x in inst.source])
    nt = highdeg_normalize(g, bip, dec, [new[x] for x in inst.target])
    mid = highdeg_connect(g, dec, ns.final, nt.final)
    return HighDegPlan(g, old, dec, ns, nt, mid)


def highdeg_yes_rule(inst: Instance) -> list[Move] | None:
    plan = highdeg_plan(inst)
    if plan is None:
        return None
    moves = plan.moves
    bad = verify_sequence(inst, moves)
    if bad:
        raise AssertionError(f"high-degree witness failed verification: {bad}")
    return moves


# ---------------------------------------------------------------- full pipeline


@dataclass(frozen=True)
class TSDecision:
    decision: str  # "yes" | "no" | "unknown"
    moves: tuple[Move, ...] | None
    trace: tuple[str, ...]
    explored: int = 0
    heuristic: bool = False
    size_bound: int | None = None


@dataclass(frozen=True)
class ComponentKernel:
    """One token-carrying component of G - N[R] after the kernel rules ran."""

    lift: list[int]
    instance: Instance
    outcome: KernelOutcome


@dataclass(frozen=True)
class TSKernel:
    status: str  # "yes" | "no" | "reduced"
    trace: tuple[str, ...]
    moves: tuple[Move, ...] = ()
    pending: tuple[ComponentKernel, ...] = ()
    size_bound: int | None = None
    reason: str = ""


def kernelize_ts(inst: Instance, report: ClassReport | None = None, limits: Limits = Limits()) -> TSKernel:
    """Rigid preprocessing then, per component, the high-degree and fat-ball rules.

    ``moves`` collects the witnesses of resolved components in original
    vertex numbering; ``pending`` holds the components left for the oracle.
    """
    if inst.variant != TS:
        raise RouteError("TS kernel needs a TS instance")
    g = inst.graph
    report = report or classify(g, 4)
    if report.bipartite is None:
        raise RouteError("TS kernels need a bipartite graph (bipartite C4-free or bounded-degree bipartite)")
    c4free = report.bipartite_c4_free
    trace = ["route:" + ("bipartite-c4-free" if c4free else "bipartite-bounded-degree")]
    pre = preprocess_rigid(inst, limits)
    if isinstance(pre, KernelOutcome):
        return TSKernel("no", tuple(trace) + pre.trace, reason=pre.reason)
    trace.append(f"rigid-ok:{len(pre.rigid)}")
    moves: list[Move] = []
    pending = []
    bound = 0
    for comp, cs, ct in pre.parts:
        cg, c_old = pre.graph.induced(comp)
        c_new = {x: i for i, x in enumerate(c_old)}
        lift = [pre.old[x] for x in c_old]
        sub = Instance(cg, [c_new[x] for x in cs], [c_new[x] for x in ct], TS)
        tag = f"@{lift[0] + 1}"
        if cs == ct:
            trace.append("identity" + tag)
            continue
        if c4free:
            found = highdeg_yes_rule(sub)
            if found is not None:
                trace.append("highdeg-yes" + tag)
                moves += _lift(found, lift)
                continue
            trace.append("highdeg:pass" + tag)
        try:
            out = kernelize_ts_bounded_degree(sub)
        except SlideError as exc:
            trace.append(f"fat-route-failed{tag}:{exc}")
            out = KernelOutcome("reduced", instance=sub, size_bound=bounded_degree_bound(sub.k, cg.max_degree))
        if out.status == "yes":
            trace.append("fat-ball-yes" + tag)
            moves += _lift(out.moves, lift)
            continue
        trace.append("kernel-reduced" + tag)
        bound = max(bound, out.size_bound or 0)
        pending.append(ComponentKernel(lift, sub, out))
    status = "reduced" if pending else "yes"
    return TSKernel(status, tuple(trace), tuple(moves), tuple(pending), bound or None)


def solve_ts(inst: Instance, report: ClassReport | None = None, limits: Limits = Limits()) -> TSDecision:
    if inst.variant != TS:
        raise RouteError("solve_ts needs a TS instance")
    report = report or classify(inst.graph, 4)
    if report.bipartite is None:
        r = bfs_reach(inst, limits)
        dec = {"reachable": "yes", "unreachable": "no"}.get(r.status, "unknown")
        return TSDecision(dec, r.moves, ("route:none", "oracle"), r.explored, heuristic=True)
    ker = kernelize_ts(inst, report, limits)
    trace = list(ker.trace)
    if ker.status == "no":
        return TSDecision("no", None, tuple(trace))
    moves = list(ker.moves)
    explored = 0
    for part in ker.pending:
        tag = f"@{part.lift[0] + 1}"
        r = bfs_reach(part.instance, limits)
        explored += r.explored
        if r.status == "unreachable":
            trace.append("oracle-no" + tag)
            return TSDecision("no", None, tuple(trace), explored, size_bound=ker.size_bound)
        if r.status == "limit":
            trace.append("oracle-limit" + tag)
            return TSDecision("unknown", None, tuple(trace), explored, size_bound=ker.size_bound)
        trace.append("oracle-yes" + tag)
        moves += _lift(r.moves, part.lift)
    bad = verify_sequence(inst, moves)
    if bad:
        raise AssertionError(f"assembled witness failed verification: {bad}")
    return TSDecision("yes", tuple(moves), tuple(trace), explored, size_bound=ker.size_bound)
