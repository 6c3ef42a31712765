"""Token Jumping kernelisation for {C3,C4}-free and sparse-remainder instances."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import ClassReport, Graph, girth, is_sparse
from .oracle import TJ, Instance, Move, verify_sequence


class RouteError(ValueError):
    """The instance does not belong to the class a rule needs."""


@dataclass(frozen=True)
class KernelOutcome:
    status: str  # "yes" | "no" | "reduced"
    moves: tuple[Move, ...] | None = None
    instance: Instance | None = None
    size_bound: int | None = None
    trace: tuple[str, ...] = field(default_factory=tuple)
    reason: str = ""


@dataclass(frozen=True)
class KernelThresholds:
    k: int
    epsilon: float

    @property
    def sparse(self) -> float:
        return self.k * (2 * self.k) ** (1 / self.epsilon)

    @property
    def degree(self) -> int:
        return 3 * self.k

    @property
    def triangle_free(self) -> int:
        return self.k * (self.k - 1) + 1


def split_parts(g: Graph, s, t) -> tuple[list[int], list[int]]:
    """Vertices of H = G - N[S u T] and of J = G[N[S u T]]."""
    j = g.closed_nbhd(set(s) | set(t))
    return [v for v in range(g.n) if v not in j], sorted(j)


def min_degree_independent_set(h: Graph, k: int) -> list[int]:
    """Repeatedly take a minimum-degree vertex z and delete N[z]."""
    alive = set(range(h.n))
    out = []
    while alive and len(out) < k:
        z = min(alive, key=lambda x: (len(h.nbr_sets[x] & alive), x))
        out.append(z)
        alive -= h.nbr_sets[z] | {z}
    return out


def greedy_sparse_independent_set(h: Graph, k: int, eps: float) -> list[int] | None:
    if not is_sparse(h, eps):
        raise RouteError(f"graph has {h.m} edges > n^(2-eps) = {h.n ** (2 - eps):.3f}")
    found = min_degree_independent_set(h, k)
    return found if len(found) == k else None


def triangle_free_independent_set(h: Graph, k: int) -> list[int]:
    """Greedy lowest-index independent set, else the neighbourhood of a degree >= k vertex.

    At least one branch yields k vertices once |V(h)| >= k(k-1)+1: when
    every degree is below k each pick deletes at most k vertices.
    """
    alive = set(range(h.n))
    out: list[int] = []
    while alive and len(out) < k:
        z = min(alive)
        out.append(z)
        alive -= h.nbr_sets[z] | {z}
    if len(out) >= k:
        return out
    hub = next((v for v in range(h.n) if h.degree(v) >= k), None)
    if hub is not None:
        return list(h.adj[hub][:k])
    return out


def _jump_via(inst: Instance, hold: list[int]) -> list[Move]:
    """Jump S-only tokens onto ``hold`` then onto the T-only vertices."""
    movers = sorted(inst.source - inst.target)
    goals = sorted(inst.target - inst.source)
    return [Move(a, b) for a, b in zip(movers, hold)] + [Move(b, c) for b, c in zip(hold, goals)]


def _h_graph(inst: Instance) -> tuple[Graph, list[int]]:
    h_vertices, _ = split_parts(inst.graph, inst.source, inst.target)
    return inst.graph.induced(h_vertices)


def _checked_yes(inst: Instance, moves: list[Move], rule: str, trace: list[str]) -> KernelOutcome:
    bad = verify_sequence(inst, moves)
    if bad:
        raise AssertionError(f"{rule} witness failed verification: {bad}")
    return KernelOutcome("yes", tuple(moves), trace=tuple(trace + [rule]))


def sparse_part_rule(inst: Instance, eps: float) -> list[Move] | None:
    h, old = _h_graph(inst)
    if not is_sparse(h, eps):
        raise RouteError("H is not eps-sparse")
    if h.n <= KernelThresholds(inst.k, eps).sparse:
        return None
    found = greedy_sparse_independent_set(h, inst.k, eps)
    if found is None:
        return None
    return _jump_via(inst, [old[x] for x in found])


def triangle_free_rule(inst: Instance) -> list[Move] | None:
    h, old = _h_graph(inst)
    if h.n < KernelThresholds(inst.k, 1).triangle_free:
        return None
    found = triangle_free_independent_set(h, inst.k)
    if len(found) < inst.k:
        raise RouteError("H is not triangle-free")
    return _jump_via(inst, [old[x] for x in found])


def neighborhood_degree_rule(inst: Instance) -> list[Move] | None:
    g = inst.graph
    st = inst.source | inst.target
    _, j_vertices = split_parts(g, inst.source, inst.target)
    jg, j_old = g.induced(j_vertices)
    if girth(jg) < 5:
        raise RouteError("J = G[N[S u T]] contains a C3 or C4")
    j_new = {v: i for i, v in enumerate(j_old)}
    threshold = 3 * inst.k
    heavy = [v for v in j_old if jg.degree(j_new[v]) >= threshold]
    if not heavy:
        return None
    hubs = [v for v in heavy if v in st]
    if not hubs:
        raise RouteError(f"vertex {heavy[0]} of N(S u T) has J-degree >= 3k; impossible without C3/C4")
    w = hubs[0]
    private = [x for x in g.adj[w] if x not in st and g.nbr_sets[x] & st == {w}]
    movers = sorted(inst.source - inst.target)
    goals = sorted(inst.target - inst.source)
    if w in inst.source and w in inst.target:
        movers.append(w)
        goals.append(w)
    movers.sort(key=lambda x: (x != w, x))
    goals.sort(key=lambda x: (x == w, x))
    hold = private[: len(movers)]
    if len(hold) < len(movers):
        raise AssertionError("fewer than k private neighbours at a 3k-degree vertex")
    return [Move(a, b) for a, b in zip(movers, hold)] + [Move(b, c) for b, c in zip(hold, goals)]


def kernel_route(inst: Instance, report: ClassReport, eps: float) -> str:
    if report.c3c4_free or report.bipartite_c4_free:
        return "c3c4-free"
    h, _ = _h_graph(inst)
    _, j_vertices = split_parts(inst.graph, inst.source, inst.target)
    if is_sparse(h, eps) and girth(inst.graph.induced(j_vertices)[0]) >= 5:
        return "sparse"
    raise RouteError("needs G {C3,C4}-free, bipartite C4-free, or (H eps-sparse and J {C3,C4}-free)")


def reduced_bound(k: int, eps: float, route: str) -> int:
    """Vertex bound certified when both rules pass: |S u T| + |N(S u T)| + |H|."""
    h_bound = k * (k - 1) if route == "c3c4-free" else int(KernelThresholds(k, eps).sparse)
    return 2 * k + 2 * k * (3 * k - 1) + h_bound


def kernelize_tj(inst: Instance, report: ClassReport, eps: float = 1.0) -> KernelOutcome:
    if inst.variant != TJ:
        raise RouteError("kernelize_tj needs a TJ instance")
    route = kernel_route(inst, report, eps)
    trace = [f"route:{route}"]
    moves = neighborhood_degree_rule(inst)
    if moves is not None:
        return _checked_yes(inst, moves, "degree-3k", trace)
    trace.append("degree-3k:pass")
    if route == "c3c4-free":
        moves, rule = triangle_free_rule(inst), "triangle-free-H"
    else:
        moves, rule = sparse_part_rule(inst, eps), "sparse-H"
    if moves is not None:
        return _checked_yes(inst, moves, rule, trace)
    trace.append(f"{rule}:pass")
    bound = reduced_bound(inst.k, eps, route)
    if inst.graph.n > bound:
        raise AssertionError(f"reduced instance has {inst.graph.n} > {bound} vertices")
    return KernelOutcome("reduced", instance=inst, size_bound=bound, trace=tuple(trace))
