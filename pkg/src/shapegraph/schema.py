"""Schemas: type definitions over (label, type) atoms, parsing, the
correspondence with shape graphs, and classification into restriction
classes.
"""

from __future__ import annotations

import enum

from .core import ONE, OPT, PLUS, STAR, Edge, Graph
from .errors import ClassPreconditionError, ParseError
from . import rbe as _rbe


class Schema:
    """Types plus a total definition map from type name to expression.

    Expression atoms are Sym((label, type)) pairs.
    """

    def __init__(self, defs: dict):
        self.types: tuple[str, ...] = tuple(defs)
        self.defs: dict[str, _rbe.Rbe] = dict(defs)
        for t, e in self.defs.items():
            for sym in _rbe.alphabet(e):
                if not (isinstance(sym, tuple) and len(sym) == 2):
                    raise ValueError(f"atom {sym!r} in rule for {t} is not label::Type")
                if sym[1] not in self.defs:
                    raise ParseError(f"rule for {t} references undefined type {sym[1]}")

    def labels(self) -> tuple[str, ...]:
        out = set()
        for e in self.defs.values():
            for lab, _ in _rbe.alphabet(e):
                out.add(lab)
        return tuple(sorted(out))

    def __eq__(self, other):
        return isinstance(other, Schema) and self.defs == other.defs

    def __hash__(self):
        return hash(tuple(sorted(self.defs.items(), key=lambda kv: kv[0])))

    def __repr__(self):
        return f"Schema({len(self.types)} types)"


class SchemaClass(enum.Enum):
    """Restriction classes, most permissive to most restrictive."""

    ShEx = 0
    ShEx0 = 1
    DetShEx0 = 2
    DetShEx0Minus = 3

    def at_least(self, other: "SchemaClass") -> bool:
        return self.value >= other.value


def parse_schema(text: str) -> Schema:
    """Parse the rule-per-line format: optional "schema" header, then
    "T -> expr" lines; '#' starts a comment."""
    defs: dict[str, _rbe.Rbe] = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            seen_header = True
            if line == "schema":
                continue
        if "->" not in line:
            raise ParseError("expected 'Type -> expression'", line=lineno)
        head, _, body = line.partition("->")
        head = head.strip()
        if not head or " " in head:
            raise ParseError(f"bad rule head {head!r}", line=lineno)
        if head in defs:
            raise ParseError(f"duplicate rule for type {head}", line=lineno)
        try:
            defs[head] = _rbe.parse_rbe(body, typed=True)
        except ParseError as exc:
            raise ParseError(f"in rule for {head}: {exc}", line=lineno) from None
    if not defs:
        raise ParseError("no rules found", line=1)
    try:
        return Schema(defs)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_schema(s: Schema) -> str:
    lines = ["schema"]
    for t in s.types:
        lines.append(f"{t} -> {_rbe.rbe_to_text(s.defs[t])}")
    return "\n".join(lines) + "\n"


def to_shape_graph(s: Schema) -> Graph:
    """One node per type, one edge per flat atom; requires every definition
    to be in the flat basic-interval fragment."""
    return _to_graph(s, basic_only=True, kind="shape")


def to_interval_graph(s: Schema) -> Graph:
    """Like to_shape_graph but admits arbitrary intervals on atoms."""
    return _to_graph(s, basic_only=False, kind="general")


def _to_graph(s: Schema, basic_only: bool, kind: str) -> Graph:
    edges = []
    for t in s.types:
        atoms = _rbe.atoms_of(s.defs[t], basic_only=basic_only)
        if atoms is None:
            raise ClassPreconditionError(
                f"definition of type {t} is not a parallel composition of "
                f"{'basic-interval ' if basic_only else ''}atoms"
            )
        for (lab, target), iv in atoms:
            edges.append(Edge(t, lab, target, iv))
    return Graph(s.types, edges, kind=kind)


def from_shape_graph(g: Graph) -> Schema:
    """Inverse of to_shape_graph: node = type, out-edges = atoms."""
    if not g.is_shape:
        raise ClassPreconditionError("graph uses non-basic occurrence intervals")
    defs = {}
    for n in g.nodes:
        parts = []
        for e in g.out(n):
            sym = _rbe.Sym((e.label, e.target))
            parts.append(sym if e.occur == ONE else _rbe.Repeat(sym, e.occur))
        defs[n] = _rbe.concat_all(parts)
    return Schema(defs)


def star_closed_references(g: Graph) -> dict:
    """Least fixed point of: a reference (edge) is *-closed iff its
    occurrence is *, or its source has at least one reference and all
    references to the source are *-closed.

    The inductive reading means a closed non-* reference always has an
    ascending chain of closed references ending in an actual *-edge; pure
    reference cycles and reference-free sources are not closed.  That anchor
    is what the characterizing-graph construction relies on.
    Returns a mapping edge-index -> bool over g.edges.
    """
    refs_to = {n: [] for n in g.nodes}
    for i, e in enumerate(g.edges):
        refs_to[e.target].append(i)
    closed = [e.occur == STAR for e in g.edges]
    changed = True
    while changed:
        changed = False
        for i, e in enumerate(g.edges):
            if closed[i]:
                continue
            incoming = refs_to[e.source]
            if incoming and all(closed[j] for j in incoming):
                closed[i] = True
                changed = True
    return {i: closed[i] for i in range(len(g.edges))}


def classify(s: Schema):
    """Most restrictive applicable class plus diagnostics for each stricter
    class that fails."""
    diagnostics: list[str] = []
    flat = True
    for t in s.types:
        if _rbe.to_rbe0(s.defs[t]) is None:
            diagnostics.append(f"rule for {t} is not a parallel composition of basic-interval atoms")
            flat = False
    if not flat:
        return SchemaClass.ShEx, diagnostics

    g = to_shape_graph(s)
    deterministic = True
    for n in g.nodes:
        labels = [e.label for e in g.out(n)]
        for lab in sorted(set(labels)):
            if labels.count(lab) > 1:
                diagnostics.append(f"type {n} uses label {lab} more than once")
                deterministic = False
    if not deterministic:
        return SchemaClass.ShEx0, diagnostics

    minus = True
    for e in g.edges:
        if e.occur == PLUS:
            diagnostics.append(f"edge {e.source} {e.label} {e.target} uses the + interval")
            minus = False
    closed = star_closed_references(g)
    refs_to = {n: [] for n in g.nodes}
    for i, e in enumerate(g.edges):
        refs_to[e.target].append(i)
    for n in g.nodes:
        if not any(e.occur == OPT for e in g.out(n)):
            continue
        if not refs_to[n]:
            diagnostics.append(f"type {n} uses ? but is never referenced")
            minus = False
            continue
        for i in refs_to[n]:
            if not closed[i]:
                e = g.edges[i]
                diagnostics.append(
                    f"type {n} uses ? but the reference {e.source} {e.label} {e.target} is not *-closed"
                )
                minus = False
    if not minus:
        return SchemaClass.DetShEx0, diagnostics
    return SchemaClass.DetShEx0Minus, diagnostics
