"""Command-line interface: classify, solve, kernelize, gadget, verify, random.

Exit codes: 0 decided or emitted, 1 undecided within limits, 2 input error.
Wall-clock statistics go to stderr so stdout and artifact files are reproducible.
"""

from __future__ import annotations

import math
import random
import sys
import time
from pathlib import Path

import click

from . import fileio
from .gadgets import GadgetError, build_guard_gadget, build_mis_gadget
from .graph import Graph, ParseError, bfs_distances, classify, grid_graph, is_independent, parse_graph_lines
from .oracle import TJ, TS, Instance, Limits, bfs_reach, check_moves, replay
from .tj_kernel import RouteError, kernelize_tj
from .ts_kernel import kernelize_ts, solve_ts


class InputError(click.ClickException):
    exit_code = 2


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from None


def _load_instance(path: str) -> Instance:
    try:
        return fileio.parse_instance(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path: str | None, text: str):
    if path is None:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


def _stats(**kw):
    click.echo("stats: " + " ".join(f"{k}={v}" for k, v in kw.items()), err=True)


def _fmt_moves(moves) -> str:
    return " ".join(f"{a + 1}>{b + 1}" for a, b in moves)


@click.group()
def main():
    """Independent set reconfiguration toolkit."""


@main.command("classify")
@click.argument("graph_file", type=click.Path(dir_okay=False))
@click.option("--p", default=5, show_default=True, help="Largest induced cycle length to test.")
@click.option("--eps", multiple=True, type=float, default=(1.0,), show_default=True)
def cmd_classify(graph_file, p, eps):
    """Structural class report for a graph or instance file."""
    try:
        g, extra = parse_graph_lines(_read(graph_file).splitlines())
        for lineno, line in extra:
            if line.split()[0] not in ("src", "tgt", "variant"):
                raise ParseError(lineno, f"unexpected line {line!r}")
        rep = classify(g, p, eps)
    except (ParseError, ValueError) as exc:
        raise InputError(f"{graph_file}: {exc}") from None
    yn = {True: "yes", False: "no"}
    gi = "inf" if math.isinf(rep.girth) else str(int(rep.girth))
    head = [f"bipartite: {yn[rep.bipartite is not None]}", f"girth: {gi}"]
    if 4 in rep.induced_cycle_free:
        head.append(f"C4-free: {yn[rep.induced_cycle_free[4]]}")
    click.echo(", ".join(head))
    click.echo(f"vertices: {g.n}, edges: {g.m}, max degree: {rep.max_degree}")
    for ell, ok in sorted(rep.induced_cycle_free.items()):
        click.echo(f"induced C{ell}-free: {yn[ok]}")
    for e, ok in sorted(rep.sparsity.items()):
        click.echo(f"{e:g}-sparse: {yn[ok]}")


def _solve(inst: Instance, strategy: str, limits: Limits, eps: float):
    """Returns (decision, moves, trace, explored, reason)."""
    if strategy == "oracle":
        r = bfs_reach(inst, limits)
        dec = {"reachable": "yes", "unreachable": "no"}.get(r.status, "unknown")
        return dec, r.moves, ["oracle"], r.explored, "oracle exhausted"
    report = classify(inst.graph, 5)
    if inst.variant == TS:
        d = solve_ts(inst, report, limits)
        reason = "rigid mismatch" if "rigid-mismatch" in d.trace else (
            "component token counts differ" if "component-count-mismatch" in d.trace else "oracle exhausted"
        )
        return d.decision, d.moves, list(d.trace), d.explored, reason
    try:
        out = kernelize_tj(inst, report, eps)
    except RouteError:
        r = bfs_reach(inst, limits)
        dec = {"reachable": "yes", "unreachable": "no"}.get(r.status, "unknown")
        return dec, r.moves, ["route:none", "oracle"], r.explored, "oracle exhausted"
    trace = list(out.trace)
    if out.status == "yes":
        return "yes", out.moves, trace, 0, ""
    r = bfs_reach(out.instance, limits)
    trace.append({"reachable": "oracle-yes", "unreachable": "oracle-no"}.get(r.status, "oracle-limit"))
    dec = {"reachable": "yes", "unreachable": "no"}.get(r.status, "unknown")
    return dec, r.moves, trace, r.explored, "oracle exhausted"


@main.command("solve")
@click.argument("instance_file", type=click.Path(dir_okay=False))
@click.option("--strategy", type=click.Choice(["auto", "oracle"]), default="auto", show_default=True)
@click.option("--max-configs", default=5_000_000, show_default=True, type=click.IntRange(1))
@click.option("--max-millis", default=120_000, show_default=True, type=click.IntRange(1))
@click.option("--eps", default=1.0, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--out", type=click.Path(dir_okay=False), help="Write the witness sequence here.")
def cmd_solve(instance_file, strategy, max_configs, max_millis, eps, out):
    """Decide reachability; print decision, witness and rule trace."""
    inst = _load_instance(instance_file)
    t0 = time.perf_counter()
    dec, moves, trace, explored, reason = _solve(inst, strategy, Limits(max_configs, max_millis), eps)
    _stats(explored=explored, ms=round(1000 * (time.perf_counter() - t0)))
    click.echo({"yes": "YES", "no": f"NO ({reason})", "unknown": "UNKNOWN (limits reached)"}[dec])
    click.echo("trace: " + " > ".join(trace))
    if dec == "yes":
        click.echo(f"moves: {len(moves)}")
        click.echo("witness: " + _fmt_moves(moves))
        if out:
            _write(out, fileio.serialize_sequence(inst.k, inst.variant, moves))
    if dec == "unknown":
        sys.exit(1)


@main.command("kernelize")
@click.argument("instance_file", type=click.Path(dir_okay=False))
@click.option("--eps", default=1.0, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--max-configs", default=5_000_000, show_default=True, type=click.IntRange(1))
@click.option("--max-millis", default=120_000, show_default=True, type=click.IntRange(1))
@click.option("--out", type=click.Path(dir_okay=False), help="Reduced instance or witness sequence.")
def cmd_kernelize(instance_file, eps, max_configs, max_millis, out):
    """Apply the kernel rules; emit a witness, a NO, or the reduced instance."""
    inst = _load_instance(instance_file)
    report = classify(inst.graph, 5)
    try:
        if inst.variant == TJ:
            res = kernelize_tj(inst, report, eps)
            status, moves, trace, bound, reduced = res.status, res.moves, res.trace, res.size_bound, res.instance
            reason = res.reason
        else:
            res = kernelize_ts(inst, report, Limits(max_configs, max_millis))
            status, moves, trace, bound, reason = res.status, res.moves, res.trace, res.size_bound, res.reason
            reduced = None
            if status == "reduced":
                keep = sorted({v for part in res.pending for v in part.lift})
                h, old = inst.graph.induced(keep)
                new = {v: i for i, v in enumerate(old)}
                reduced = Instance(
                    h,
                    [new[v] for v in inst.source if v in new],
                    [new[v] for v in inst.target if v in new],
                    TS,
                )
    except RouteError as exc:
        raise InputError(f"class route unavailable: {exc}") from None
    click.echo("trace: " + " > ".join(trace))
    if status == "yes":
        click.echo("YES")
        click.echo(f"moves: {len(moves)}")
        click.echo("witness: " + _fmt_moves(moves))
        if out:
            _write(out, fileio.serialize_sequence(inst.k, inst.variant, moves))
    elif status == "no":
        click.echo(f"NO ({reason})")
    else:
        click.echo(f"REDUCED vertices={reduced.graph.n} k={reduced.k} bound={bound}")
        if moves:
            click.echo("resolved-components-witness: " + _fmt_moves(moves))
        if out:
            _write(out, fileio.serialize_instance(reduced))


@main.command("gadget")
@click.argument("kind", type=click.Choice(["grid", "mis"]))
@click.argument("input_file", type=click.Path(dir_okay=False))
@click.option("--p", default=4, show_default=True, help="Guard path length (grid kind).")
@click.option("--out", required=True, help="Output prefix; writes <prefix>.inst and <prefix>.roles.")
def cmd_gadget(kind, input_file, p, out):
    """Build a hardness gadget from a graph with 'part' lines."""
    try:
        g, parts = fileio.parse_partitioned_graph(_read(input_file))
        if kind == "grid":
            if p % 2:
                raise GadgetError(f"p must be even, got {p}")
            gad = build_guard_gadget(g, parts, p)
            inst, roles = gad.instance(), gad.roles
        else:
            gad = build_mis_gadget(g, parts)
            inst, roles = gad.instance(), gad.roles
    except (ParseError, GadgetError) as exc:
        raise InputError(str(exc)) from None
    _write(out + ".inst", fileio.serialize_instance(inst))
    _write(out + ".roles", fileio.serialize_roles(roles))
    click.echo(f"vertices: {inst.graph.n}, edges: {inst.graph.m}, tokens: {inst.k}")


@main.command("verify")
@click.argument("instance_file", type=click.Path(dir_okay=False))
@click.argument("sequence_file", type=click.Path(dir_okay=False))
def cmd_verify(instance_file, sequence_file):
    """Replay a sequence file against an instance."""
    inst = _load_instance(instance_file)
    try:
        k, variant, moves = fileio.parse_sequence(_read(sequence_file))
    except ParseError as exc:
        raise InputError(f"{sequence_file}: {exc}") from None
    if k != inst.k or variant != inst.variant:
        raise InputError(f"sequence is for k={k} {variant}, instance is k={inst.k} {inst.variant}")
    bad = check_moves(inst.graph, inst.source, moves, inst.variant)
    if bad is None and replay(inst.source, moves)[-1] != inst.target:
        bad = f"move {len(moves)}: final configuration differs from target"
    if bad is not None:
        raise InputError(f"VIOLATION {bad}")
    click.echo(f"OK {len(moves)} moves")


def _random_graph(family: str, n: int, rng: random.Random) -> Graph:
    if family == "grid":
        rows = max(1, math.isqrt(n))
        return grid_graph(rows, max(1, n // rows))
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    if family == "tree":
        return Graph.from_edges(n, edges)
    g = Graph.from_edges(n, edges)
    for _ in range(2 * n):
        u, v = rng.sample(range(n), 2)
        d = bfs_distances(g, [u]).get(v, math.inf)
        ok = d >= 4 if family == "girth5" else (d >= 5 and d % 2 == 1)
        if ok:
            g = Graph.from_edges(n, list(g.edges()) + [(u, v)])
    return g


def _random_set(g: Graph, k: int, rng: random.Random, tries: int = 2000) -> list[int] | None:
    for _ in range(tries):
        s = sorted(rng.sample(range(g.n), k))
        if is_independent(g, s):
            return s
    return None


@main.command("random")
@click.option("--family", type=click.Choice(["tree", "grid", "girth5", "bipartite-c4free"]), required=True)
@click.option("--n", type=click.IntRange(2), required=True)
@click.option("--k", type=click.IntRange(1), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--variant", type=click.Choice([TS, TJ]), default=TS, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def cmd_random(family, n, k, seed, variant, out):
    """Seeded random instance in a named graph family."""
    rng = random.Random(seed)
    g = _random_graph(family, n, rng)
    if k > g.n:
        raise InputError(f"k={k} exceeds the {g.n} vertices")
    s = _random_set(g, k, rng)
    t = _random_set(g, k, rng) if s is not None else None
    if s is None or t is None:
        raise InputError(f"no independent set of size {k} found after bounded rejection sampling")
    _write(out, fileio.serialize_instance(Instance(g, s, t, variant)))


if __name__ == "__main__":
    main()
