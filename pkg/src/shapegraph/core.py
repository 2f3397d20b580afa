"""Occurrence intervals, bags, and the unified graph model.

Graphs come in three refinements: simple (all occurrences [1;1], no parallel
same-label edges), shape (basic occurrences only), and compressed (singleton
occurrences, no parallel same-label edges).  A line-oriented text format is
provided for all of them.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import GraphKindError, ParseError, UnpackBudgetError

INF = math.inf


@dataclass(frozen=True, order=False)
class Interval:
    """Occurrence interval [min;max] over naturals, max possibly infinite."""

    min: int
    max: int | float

    def __post_init__(self):
        if not isinstance(self.min, int) or self.min < 0:
            raise ValueError(f"interval lower bound must be a natural, got {self.min!r}")
        if self.max != INF and (not isinstance(self.max, int) or self.max < 0):
            raise ValueError(f"interval upper bound must be a natural or INF, got {self.max!r}")
        if self.min > self.max:
            raise ValueError(f"empty interval [{self.min};{self.max}]")

    def __contains__(self, k: int) -> bool:
        return self.min <= k <= self.max

    @property
    def basic(self) -> bool:
        return self in (ONE, OPT, PLUS, STAR)

    @property
    def singleton(self) -> bool:
        return self.min == self.max and self.max != INF

    def __add__(self, other: "Interval") -> "Interval":
        lo = self.min + other.min
        hi = INF if INF in (self.max, other.max) else self.max + other.max
        return Interval(lo, hi)

    def subset(self, other: "Interval") -> bool:
        return other.min <= self.min and self.max <= other.max

    def __str__(self) -> str:
        shorthand = {ONE: "1", OPT: "?", PLUS: "+", STAR: "*"}.get(self)
        if shorthand is not None:
            return shorthand
        if self.singleton:
            return str(self.min)
        hi = "inf" if self.max == INF else str(self.max)
        return f"[{self.min};{hi}]"


ONE = Interval(1, 1)
OPT = Interval(0, 1)
PLUS = Interval(1, INF)
STAR = Interval(0, INF)
ZERO = Interval(0, 0)

BASIC_INTERVALS = (ONE, OPT, PLUS, STAR)


def interval_add(a: Interval, b: Interval) -> Interval:
    return a + b


def interval_sum(intervals) -> Interval:
    """Fold of pointwise addition; the empty fold is [0;0]."""
    acc = ZERO
    for i in intervals:
        acc = acc + i
    return acc


def interval_subset(a: Interval, b: Interval) -> bool:
    return a.subset(b)


def parse_interval_token(tok: str) -> Interval:
    """Parse an occurrence token: 1 ? + * [n;m] [n;inf] or a bare natural k."""
    shorthand = {"1": ONE, "?": OPT, "+": PLUS, "*": STAR}
    if tok in shorthand:
        return shorthand[tok]
    if tok.startswith("[") and tok.endswith("]") and ";" in tok:
        lo_s, hi_s = tok[1:-1].split(";", 1)
        try:
            lo = int(lo_s)
            hi = INF if hi_s in ("inf", "Inf", "INF", "*") else int(hi_s)
            return Interval(lo, hi)
        except ValueError as exc:
            raise ParseError(f"bad interval {tok!r}: {exc}") from None
    try:
        k = int(tok)
    except ValueError:
        raise ParseError(f"bad occurrence token {tok!r}") from None
    return Interval(k, k)


# --- Bags ------------------------------------------------------------------
#
# A bag is a Counter from symbols to positive counts; Counter equality
# already ignores zero-count entries.

Bag = Counter


def bag(*symbols) -> Bag:
    return Counter(symbols)


def bag_union(w1: Bag, w2: Bag) -> Bag:
    out = Counter(w1)
    for a, k in w2.items():
        out[a] += k
    return out


def bag_size(w: Bag) -> int:
    return sum(w.values())


def bag_key(w: Bag):
    """Hashable canonical form (for memo tables)."""
    return tuple(sorted((a, k) for a, k in w.items() if k))


# --- Graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    source: str
    label: str
    target: str
    occur: Interval = ONE


class Graph:
    """Finite labeled graph with an occurrence interval per edge.

    Nodes keep their insertion order, which the text format and all
    deterministic outputs rely on.  Instances are treated as immutable.
    """

    def __init__(self, nodes=(), edges=(), kind: str = "general"):
        seen = []
        seen_set = set()
        for n in nodes:
            if n not in seen_set:
                seen.append(n)
                seen_set.add(n)
        for e in edges:
            for n in (e.source, e.target):
                if n not in seen_set:
                    seen.append(n)
                    seen_set.add(n)
        self.nodes: tuple[str, ...] = tuple(seen)
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.kind = kind
        self._out: dict[str, tuple[Edge, ...]] = {n: () for n in self.nodes}
        self._in: dict[str, tuple[Edge, ...]] = {n: () for n in self.nodes}
        for e in self.edges:
            self._out[e.source] += (e,)
            self._in[e.target] += (e,)

    def out(self, n: str) -> tuple[Edge, ...]:
        return self._out[n]

    def incoming(self, n: str) -> tuple[Edge, ...]:
        return self._in[n]

    @property
    def is_simple(self) -> bool:
        triples = set()
        for e in self.edges:
            if e.occur != ONE:
                return False
            t = (e.source, e.label, e.target)
            if t in triples:
                return False
            triples.add(t)
        return True

    @property
    def is_shape(self) -> bool:
        return all(e.occur.basic for e in self.edges)

    @property
    def is_compressed(self) -> bool:
        triples = set()
        for e in self.edges:
            if not e.occur.singleton:
                return False
            t = (e.source, e.label, e.target)
            if t in triples:
                return False
            triples.add(t)
        return True

    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({e.label for e in self.edges}))

    def check_kind(self, kind: str) -> None:
        """Raise GraphKindError unless this graph meets the declared kind."""
        if kind == "general":
            return
        triples = set()
        for e in self.edges:
            desc = f"{e.source} {e.label} {e.target} {e.occur}"
            if kind == "simple":
                if e.occur != ONE:
                    raise GraphKindError(f"simple graph requires occurrence 1 on edge: {desc}")
            elif kind == "shape":
                if not e.occur.basic:
                    raise GraphKindError(f"shape graph requires a basic occurrence on edge: {desc}")
            elif kind == "compressed":
                if not e.occur.singleton:
                    raise GraphKindError(
                        f"compressed graph requires a singleton occurrence on edge: {desc}"
                    )
            else:
                raise GraphKindError(f"unknown graph kind {kind!r}")
            if kind in ("simple", "compressed"):
                t = (e.source, e.label, e.target)
                if t in triples:
                    raise GraphKindError(f"duplicate (source,label,target) edge: {desc}")
                triples.add(t)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and set(self.nodes) == set(other.nodes)
            and Counter(self.edges) == Counter(other.edges)
        )

    def __hash__(self):
        return hash((frozenset(self.nodes), frozenset(Counter(self.edges).items())))

    def __repr__(self):
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges, kind={self.kind!r})"


def parse_graph(text: str) -> Graph:
    """Parse the line-oriented graph format.

    Line 1 declares the kind ("graph simple|shape|compressed|general");
    the matching invariant is enforced.  Edge lines read
    "source label target [occur]", isolated nodes "node name".
    """
    kind = None
    nodes: list[str] = []
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if kind is None:
            if parts[0] != "graph" or len(parts) != 2:
                raise ParseError("expected header 'graph <kind>'", line=lineno)
            kind = parts[1]
            if kind not in ("simple", "shape", "compressed", "general"):
                raise ParseError(f"unknown graph kind {kind!r}", line=lineno)
            continue
        if parts[0] == "node":
            if len(parts) != 2:
                raise ParseError("expected 'node <name>'", line=lineno)
            nodes.append(parts[1])
            continue
        if len(parts) == 3:
            src, lab, tgt = parts
            occur = ONE
        elif len(parts) == 4:
            src, lab, tgt = parts[:3]
            try:
                occur = parse_interval_token(parts[3])
            except ParseError as exc:
                raise ParseError(str(exc), line=lineno) from None
        else:
            raise ParseError("expected 'source label target [occur]'", line=lineno)
        edges.append(Edge(src, lab, tgt, occur))
    if kind is None:
        raise ParseError("empty input: missing 'graph <kind>' header", line=1)
    g = Graph(nodes, edges, kind=kind)
    g.check_kind(kind)
    return g


def serialize_graph(g: Graph, kind: str | None = None) -> str:
    kind = kind or g.kind
    g.check_kind(kind)
    lines = [f"graph {kind}"]
    with_edges = {e.source for e in g.edges} | {e.target for e in g.edges}
    for n in g.nodes:
        if n not in with_edges:
            lines.append(f"node {n}")
    for e in g.edges:
        if e.occur == ONE:
            lines.append(f"{e.source} {e.label} {e.target}")
        else:
            lines.append(f"{e.source} {e.label} {e.target} {e.occur}")
    return "\n".join(lines) + "\n"


# --- Unpacking of compressed graphs ----------------------------------------


def _strongly_connected_components(g: Graph) -> list[list[str]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[list[str]] = []
    counter = [0]

    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(g.out(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for e in it:
                w = e.target
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.out(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


DEFAULT_UNPACK_CAP = 10**6


def unpack(f: Graph, max_nodes: int = DEFAULT_UNPACK_CAP):
    """Expand a compressed graph into a simple graph plus a copy map.

    Every copy of a node n has, for each edge (n,a,m,[k;k]), exactly k
    outgoing a-edges to k distinct copies of m.  Copy counts follow the
    incoming-cardinality product along the condensation; members of a
    non-trivial strongly connected component all receive as many copies as
    the largest incoming cardinality, wired round-robin (a copy may target
    itself; a card-1 self-loop is a fixed point).

    Returns (simple_graph, copy_map) where copy_map sends each new node
    to the original it copies.
    """
    if not f.is_compressed:
        raise GraphKindError("unpack requires a compressed graph")

    comps = _strongly_connected_components(f)  # reverse topological order
    comp_of = {}
    for ci, comp in enumerate(comps):
        for n in comp:
            comp_of[n] = ci
    nontrivial = set()
    for ci, comp in enumerate(comps):
        if len(comp) > 1:
            nontrivial.add(ci)
    for e in f.edges:
        if e.source == e.target:
            nontrivial.add(comp_of[e.source])

    copies: dict[str, int] = {}
    total = 0
    # comps is in reverse topological order; process in topological order.
    for comp in reversed(comps):
        ci = comp_of[comp[0]]
        if ci in nontrivial:
            max_card = 0
            for n in comp:
                for e in f.incoming(n):
                    max_card = max(max_card, e.occur.min)
            k = max(1, max_card)
            for n in comp:
                copies[n] = k
                total += k
        else:
            n = comp[0]
            s = 0
            for e in f.incoming(n):
                s += e.occur.min * copies[e.source]
            copies[n] = max(1, s)
            total += copies[n]
        if total > max_nodes:
            raise UnpackBudgetError(
                f"unpacking needs more than {max_nodes} nodes ({total} so far)"
            )

    def copy_name(n: str, i: int) -> str:
        return n if copies[n] == 1 else f"{n}.{i}"

    new_nodes = [copy_name(n, i) for n in f.nodes for i in range(copies[n])]
    copy_map = {copy_name(n, i): n for n in f.nodes for i in range(copies[n])}
    new_edges = []
    cursor: dict[tuple, int] = {}
    for n in f.nodes:
        for i in range(copies[n]):
            src = copy_name(n, i)
            for e in f.out(n):
                k = e.occur.min
                if k == 0:
                    continue
                m = e.target
                if k > copies[m]:
                    raise UnpackBudgetError(
                        f"cardinality {k} on edge {n} {e.label} {m} exceeds "
                        f"{copies[m]} available copies"
                    )
                c = cursor.get((e.label, m), 0)
                for j in range(k):
                    new_edges.append(Edge(src, e.label, copy_name(m, (c + j) % copies[m])))
                cursor[(e.label, m)] = (c + k) % copies[m]
    g = Graph(new_nodes, new_edges, kind="simple")
    g.check_kind("simple")
    return g, copy_map
