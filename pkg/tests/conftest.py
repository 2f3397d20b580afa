"""Shared fixtures: the worked examples used across the suite and random
generators for schemas, graphs, and routing instances."""

from __future__ import annotations

import random

import pytest

from shapegraph import (
    Edge,
    Graph,
    INF,
    Interval,
    ONE,
    OPT,
    PLUS,
    STAR,
    Schema,
    SchemaClass,
    classify,
    parse_schema,
)
from shapegraph.rbe import Disj, Concat, Repeat, Sym, EPSILON, concat_all


# --- Worked examples ---------------------------------------------------------

BUG_SCHEMA_TEXT = """\
schema
Bug -> descr::Literal, reportedBy::User, reproducedBy::Employee?, related::Bug*
User -> name::Literal, email::Literal?
Employee -> name::Literal, email::Literal
Literal -> eps
"""

BUG_VARIANT_TEXT = """\
schema
Bug1 -> descr::Literal, reportedBy::User1, reproducedBy::Employee?, related::Bug1*, related::Bug2*
Bug2 -> descr::Literal, reportedBy::User2, reproducedBy::Employee?, related::Bug1*, related::Bug2*
User1 -> name::Literal
User2 -> name::Literal, email::Literal
Employee -> name::Literal, email::Literal
Literal -> eps
"""

BUG_GRAPH_TEXT = """\
graph simple
bug1 descr lit1
bug1 reportedBy user1
bug1 reproducedBy emp1
user1 name lit1
emp1 name lit1
emp1 email lit1
"""


@pytest.fixture
def bug_schema():
    return parse_schema(BUG_SCHEMA_TEXT)


@pytest.fixture
def bug_variant_schema():
    return parse_schema(BUG_VARIANT_TEXT)


def chain_graph():
    """Three-node simple graph: a-edge, b-self-loop, c-edge."""
    return Graph(
        ("n0", "n1", "n2"),
        [Edge("n0", "a", "n1"), Edge("n1", "b", "n1"), Edge("n1", "c", "n2")],
        kind="simple",
    )


CHAIN_SCHEMA_TEXT = """\
schema
t0 -> a::t1
t1 -> b::t2, c::t3
t2 -> b::t2?, c::t3
t3 -> eps
"""


def chain_schema():
    return parse_schema(CHAIN_SCHEMA_TEXT)


def star_chain_pair():
    """A two-edge *-chain G and an equivalent-language graph H that G does
    not embed in (the case-enumerating unfolding of b*)."""
    g = Graph(
        ("u0", "u1", "u2"),
        [Edge("u0", "a", "u1", STAR), Edge("u1", "b", "u2", STAR)],
        kind="shape",
    )
    h = Graph(
        ("v0", "v1", "v2", "v3", "v4", "v5", "v6"),
        [
            Edge("v0", "a", "v1", STAR),
            Edge("v0", "a", "v2", STAR),
            Edge("v2", "b", "v3", ONE),
            Edge("v0", "a", "v4", STAR),
            Edge("v4", "b", "v5", ONE),
            Edge("v4", "b", "v6", STAR),
        ],
        kind="shape",
    )
    return g, h


# --- Random generators -------------------------------------------------------

BASIC = [ONE, OPT, PLUS, STAR]


def random_simple_graph(rng: random.Random, max_nodes=5, labels=("a", "b")):
    n = rng.randint(1, max_nodes)
    nodes = [f"g{i}" for i in range(n)]
    edges = []
    for s in nodes:
        for t in nodes:
            for lab in labels:
                if rng.random() < 0.3:
                    edges.append(Edge(s, lab, t))
    return Graph(nodes, edges, kind="simple")


def random_shape_graph(rng: random.Random, max_nodes=5, labels=("a", "b")):
    n = rng.randint(1, max_nodes)
    nodes = [f"h{i}" for i in range(n)]
    edges = []
    for s in nodes:
        for t in nodes:
            for lab in labels:
                if rng.random() < 0.3:
                    edges.append(Edge(s, lab, t, rng.choice(BASIC)))
    return Graph(nodes, edges, kind="shape")


def random_compressed_graph(rng: random.Random, max_nodes=4, labels=("a", "b"), max_card=3):
    n = rng.randint(1, max_nodes)
    nodes = [f"c{i}" for i in range(n)]
    edges = []
    for s in nodes:
        for t in nodes:
            for lab in labels:
                if rng.random() < 0.3:
                    c = rng.randint(1, max_card)
                    edges.append(Edge(s, lab, t, Interval(c, c)))
    return Graph(nodes, edges, kind="compressed")


def random_rbe0_schema(rng: random.Random, max_types=4, labels=("a", "b"), max_edges=3):
    m = rng.randint(1, max_types)
    types = [f"t{i}" for i in range(m)]
    defs = {}
    for t in types:
        parts = []
        for lab in rng.sample(labels, rng.randint(0, min(max_edges, len(labels)))):
            sym = Sym((lab, rng.choice(types)))
            iv = rng.choice(BASIC)
            parts.append(sym if iv == ONE else Repeat(sym, iv))
        defs[t] = concat_all(parts)
    return Schema(defs)


def random_minus_schema(rng: random.Random, max_types=6, labels=("a", "b", "c"), max_edges=3):
    """Random schema repaired into the deterministic ?-closed class: start
    from distinct-label rules with 1/?/* occurrences, then promote
    occurrences to * until classification succeeds (each repair step strictly
    grows the set of *-edges, so it terminates)."""
    from shapegraph.schema import star_closed_references, to_shape_graph

    m = rng.randint(1, max_types)
    types = [f"t{i}" for i in range(m)]
    edge_list = []  # mutable [src, label, tgt, interval]
    for t in types:
        for lab in rng.sample(labels, rng.randint(0, min(max_edges, len(labels)))):
            occ = rng.choice([ONE, OPT, OPT, STAR, STAR])
            edge_list.append([t, lab, rng.choice(types), occ])

    def build():
        defs = {}
        for t in types:
            parts = []
            for src, lab, tgt, occ in edge_list:
                if src == t:
                    sym = Sym((lab, tgt))
                    parts.append(sym if occ == ONE else Repeat(sym, occ))
            defs[t] = concat_all(parts)
        return Schema(defs)

    for _ in range(len(edge_list) * 4 + 4):
        s = build()
        if classify(s)[0] == SchemaClass.DetShEx0Minus:
            return s
        g = to_shape_graph(s)
        closed = star_closed_references(g)
        refs_to = {t: [] for t in types}
        for i, e in enumerate(g.edges):
            refs_to[e.target].append(i)
        for t in types:
            if not any(e.occur == OPT for e in g.out(t)):
                continue
            if not refs_to[t]:
                # Un-referenced ?-user: its ?-edges become *.
                for row in edge_list:
                    if row[0] == t and row[3] == OPT:
                        row[3] = STAR
            else:
                for i in refs_to[t]:
                    if not closed[i]:
                        e = g.edges[i]
                        for row in edge_list:
                            if (row[0], row[1], row[2]) == (e.source, e.label, e.target):
                                row[3] = STAR
    s = build()
    assert classify(s)[0] == SchemaClass.DetShEx0Minus
    return s


def random_flat_rbe(rng: random.Random, symbols=("a", "b", "c"), depth=3):
    """Random expression whose Repeat bodies are repeat-free (the fragment on
    which the linear-arithmetic encoding is exact)."""

    def flat(d):
        if d == 0 or rng.random() < 0.4:
            return Sym(rng.choice(symbols))
        op = rng.choice([Disj, Concat])
        return op(flat(d - 1), flat(d - 1))

    def expr(d):
        r = rng.random()
        if d == 0 or r < 0.3:
            return Sym(rng.choice(symbols))
        if r < 0.5:
            lo = rng.randint(0, 2)
            hi = rng.choice([lo, lo + 1, lo + 2, INF])
            return Repeat(flat(min(d - 1, 2)), Interval(lo, hi))
        if r < 0.55:
            return EPSILON
        op = rng.choice([Disj, Concat])
        return op(expr(d - 1), expr(d - 1))

    return expr(depth)


def random_bag(rng: random.Random, symbols=("a", "b", "c"), max_size=5):
    from collections import Counter

    size = rng.randint(0, max_size)
    return Counter(rng.choice(symbols) for _ in range(size))
