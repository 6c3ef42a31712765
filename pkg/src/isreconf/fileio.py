"""Instance, sequence, role-map and partition text formats (1-based on disk)."""

from __future__ import annotations

from typing import Sequence

from .graph import Graph, ParseError, parse_graph_lines, serialize_graph
from .oracle import TJ, TS, Instance, Move


def _ints(lineno: int, fields: Sequence[str], n: int | None = None) -> list[int]:
    try:
        vals = [int(x) for x in fields]
    except ValueError:
        raise ParseError(lineno, "expected integers") from None
    if n is not None and any(not 1 <= v <= n for v in vals):
        raise ParseError(lineno, f"vertex index out of range 1..{n}")
    return [v - 1 for v in vals]


def parse_instance(text: str) -> Instance:
    lines = text.splitlines()
    g, extra = parse_graph_lines(lines)
    src = tgt = None
    variant = None
    for lineno, line in extra:
        head, *rest = line.split()
        if head == "src" and src is None:
            src = _ints(lineno, rest, g.n)
        elif head == "tgt" and tgt is None:
            tgt = _ints(lineno, rest, g.n)
        elif head == "variant" and variant is None:
            if rest not in ([TS], [TJ]):
                raise ParseError(lineno, "variant must be TS or TJ")
            variant = rest[0]
        else:
            raise ParseError(lineno, f"unexpected line {line!r}")
    for name, val in (("src", src), ("tgt", tgt), ("variant", variant)):
        if val is None:
            raise ParseError(len(lines) + 1, f"missing '{name}' line")
    if len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
        raise ParseError(len(lines) + 1, "repeated vertex in src or tgt")
    try:
        return Instance(g, src, tgt, variant)
    except ValueError as exc:
        raise ParseError(len(lines) + 1, str(exc)) from None


def serialize_instance(inst: Instance) -> str:
    out = serialize_graph(inst.graph)
    out += "src " + " ".join(str(v + 1) for v in sorted(inst.source)) + "\n"
    out += "tgt " + " ".join(str(v + 1) for v in sorted(inst.target)) + "\n"
    return out + f"variant {inst.variant}\n"


def parse_sequence(text: str) -> tuple[int, str, list[Move]]:
    k = variant = None
    moves = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        head, *rest = line.split()
        if head == "s" and k is None:
            if len(rest) != 2 or rest[1] not in (TS, TJ):
                raise ParseError(lineno, "header must be 's <k> TS|TJ'")
            k = _ints(lineno, rest[:1])[0] + 1
            variant = rest[1]
        elif head == "m" and k is not None:
            if len(rest) != 2:
                raise ParseError(lineno, "move line must be 'm <from> <to>'")
            a, b = _ints(lineno, rest)
            if a < 0 or b < 0:
                raise ParseError(lineno, "vertex indices are 1-based")
            moves.append(Move(a, b))
        else:
            raise ParseError(lineno, f"unexpected line {line!r}")
    if k is None:
        raise ParseError(1, "missing header 's <k> <variant>'")
    return k, variant, moves


def serialize_sequence(k: int, variant: str, moves: Sequence[Move]) -> str:
    lines = [f"s {k} {variant}"] + [f"m {a + 1} {b + 1}" for a, b in moves]
    return "\n".join(lines) + "\n"


def serialize_roles(roles: dict[int, str]) -> str:
    return "".join(f"role {v + 1} {name}\n" for v, name in sorted(roles.items()))


def parse_partitioned_graph(text: str) -> tuple[Graph, list[list[int]]]:
    """Graph lines followed by one 'part <v1> <v2> ...' line per part."""
    g, extra = parse_graph_lines(text.splitlines())
    parts = []
    for lineno, line in extra:
        head, *rest = line.split()
        if head != "part" or not rest:
            raise ParseError(lineno, f"expected 'part <v1> ...', got {line!r}")
        parts.append(_ints(lineno, rest, g.n))
    if not parts:
        raise ParseError(len(text.splitlines()) + 1, "no 'part' lines")
    return g, parts


def serialize_partitioned_graph(g: Graph, parts: Sequence[Sequence[int]]) -> str:
    out = serialize_graph(g)
    return out + "".join("part " + " ".join(str(v + 1) for v in sorted(p)) + "\n" for p in parts)
