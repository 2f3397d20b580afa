"""Schema containment: embedding-based decision for the deterministic
?-closed class, characterizing graphs, kind computation and fusing, and a
bounded exhaustive counter-example search for everything else.
"""

from __future__ import annotations

import time
from collections import Counter, deque
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product

from .core import ONE, OPT, STAR, Edge, Graph, Interval, interval_sum
from .errors import BudgetError, ClassPreconditionError
from . import rbe as _rbe
from . import validation as _val
from .embedding import embeds
from .schema import Schema, SchemaClass, classify, star_closed_references, to_shape_graph


# --- Verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class Contained:
    pass


@dataclass(frozen=True)
class NotContained:
    witness: Graph


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 6
    max_card: int = 3
    timeout: float | None = 60.0
    # Only report Contained on budget exhaustion when the caller asserts the
    # budget provably covers the counter-example bound.
    claim_complete: bool = False

    def check(self):
        if self.max_nodes < 1 or self.max_card < 1:
            raise BudgetError("budget requires max_nodes >= 1 and max_card >= 1")
        if self.timeout is not None and self.timeout <= 0:
            raise BudgetError("budget timeout must be positive")


# --- Embedding-based containment --------------------------------------------


def _require_minus(s: Schema, side: str):
    cls, diags = classify(s)
    if cls != SchemaClass.DetShEx0Minus:
        detail = f": {diags[0]}" if diags else ""
        raise ClassPreconditionError(f"{side} schema classifies as {cls.name}{detail}")


def contains_detshex0minus(h: Schema, k: Schema) -> bool:
    """H ⊆ K decided as shape-graph embedding; both schemas must classify as
    deterministic with ?-closed references."""
    _require_minus(h, "left")
    _require_minus(k, "right")
    ok, _ = embeds(to_shape_graph(h), to_shape_graph(k))
    return ok


# --- Kinds and fusing --------------------------------------------------------


@dataclass(frozen=True)
class Kind:
    h_types: frozenset
    k_types: frozenset


def kinds(g: Graph, h: Schema, k: Schema) -> dict:
    """Per node, the pair of maximal type sets against the two schemas."""
    th = _val.max_typing(g, h)
    tk = _val.max_typing(g, k)
    return {n: Kind(th[n], tk[n]) for n in g.nodes}


def fuse_to_compressed(g: Graph, h: Schema, k: Schema) -> Graph:
    """Merge all nodes of equal kind into the first such node (input order);
    the representative's out-edges, grouped by label and target kind, become
    edges with singleton cardinalities."""
    if not g.is_simple:
        raise ClassPreconditionError("fusing requires a simple graph")
    km = kinds(g, h, k)
    rep: dict = {}
    for n in g.nodes:
        rep.setdefault(km[n], n)
    edges = []
    for kind_, r in rep.items():
        grouped = Counter()
        order = []
        for e in g.out(r):
            key = (e.label, km[e.target])
            if key not in grouped:
                order.append(key)
            grouped[key] += 1
        for label, target_kind in order:
            c = grouped[(label, target_kind)]
            edges.append(Edge(r, label, rep[target_kind], Interval(c, c)))
    return Graph(tuple(rep.values()), edges, kind="compressed")


# --- Characterizing graphs ---------------------------------------------------


def characterizing_graph(h: Schema) -> Graph:
    """A polynomial-size simple graph G ∈ L(h) such that, for schemas k in
    the same class, G embeds in k's shape graph iff h's does.

    Construction (interpreting the outline; the precise original layout is
    not available):
      - each type t gets a cohort of copies: one full copy plus one variant
        per ?-edge omitting exactly that edge, and at least two copies when t
        is the target of a *-edge;
      - *-edges go from every source copy to every target copy, so any one
        source copy forces a * interval on the partner and co-relates the
        whole target cohort;
      - types that need a co-related cohort (?-using types, and recursively
        the sources of closed non-* references to such types) are covered:
        each closed non-* reference distributes its edges round-robin over
        the target cohort, which requires the source cohort to be at least
        as large (one larger when the covering edge is itself a ?-edge);
      - all other references point at the target's full copy, so full copies
        always link to full copies.

    The least-fixpoint reading of *-closure guarantees covering references
    never form a cycle, so the size demands converge.
    """
    _require_minus(h, "input")
    g = to_shape_graph(h)
    closed = star_closed_references(g)
    out_edges = {t: list(g.out(t)) for t in g.nodes}
    refs_to = {t: [] for t in g.nodes}
    for i, e in enumerate(g.edges):
        refs_to[e.target].append(i)

    opt_edges = {t: [e for e in out_edges[t] if e.occur == OPT] for t in g.nodes}
    star_referenced = {t: any(g.edges[i].occur == STAR for i in refs_to[t]) for t in g.nodes}

    # Types whose whole cohort must end up co-related to one partner node.
    covered = {t for t in g.nodes if opt_edges[t]}
    changed = True
    while changed:
        changed = False
        for i, e in enumerate(g.edges):
            if e.target in covered and closed[i] and e.occur != STAR and e.source not in covered:
                covered.add(e.source)
                changed = True

    size = {
        t: max(1 + len(opt_edges[t]), 2 if star_referenced[t] else 1) for t in g.nodes
    }
    total_opts = sum(len(v) for v in opt_edges.values())
    total_stars = sum(1 for e in g.edges if e.occur == STAR)
    bound = len(g.nodes) * (2 + total_opts) * (1 + total_stars)
    changed = True
    while changed:
        changed = False
        for i, e in enumerate(g.edges):
            if e.target in covered and closed[i] and e.occur != STAR:
                need = size[e.target] + (1 if e.occur == OPT else 0)
                if size[e.source] < need:
                    size[e.source] = need
                    changed = True
        if sum(size.values()) > bound:
            raise BudgetError("characterizing cohort sizes exceed the polynomial bound")

    def copy_name(t, i):
        return f"{t}#{i}"

    nodes = [copy_name(t, i) for t in g.nodes for i in range(size[t])]
    edges = []
    for t in g.nodes:
        for i in range(size[t]):
            omitted = opt_edges[t][i - 1] if 1 <= i <= len(opt_edges[t]) else None
            for e in out_edges[t]:
                if e.occur == STAR:
                    for j in range(size[e.target]):
                        edges.append(Edge(copy_name(t, i), e.label, copy_name(e.target, j)))
                    continue
                if e == omitted:
                    continue
                covering = e.target in covered and closed[g.edges.index(e)]
                if covering:
                    # Rank of this copy among the cohort copies emitting e.
                    rank = sum(
                        1
                        for i2 in range(i)
                        if not (
                            1 <= i2 <= len(opt_edges[t]) and opt_edges[t][i2 - 1] == e
                        )
                    )
                    j = rank % size[e.target]
                else:
                    j = 0
                edges.append(Edge(copy_name(t, i), e.label, copy_name(e.target, j)))
    cg = Graph(nodes, edges, kind="simple")
    cg.check_kind("simple")
    return cg


# --- Bounded counter-example search ------------------------------------------


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _distributions(c, slots, max_card):
    if slots == 0:
        if c == 0:
            yield ()
        return
    for first in range(min(c, max_card) + 1):
        for rest in _distributions(c - first, slots - 1, max_card):
            yield (first,) + rest


def _bags_matching(delta, caps):
    """All bags w ∈ L(delta) with per-symbol counts within caps."""
    symbols = sorted(_rbe.alphabet(delta), key=str)
    e0 = _rbe.to_rbe0(delta)
    if e0 is not None:
        per_symbol = {a: [] for a in symbols}
        for a, iv in e0.atoms:
            per_symbol[a].append(iv)
        ranges = []
        for a in symbols:
            iv = interval_sum(per_symbol[a])
            ranges.append([c for c in range(caps.get(a, 0) + 1) if c in iv])
        out = []
        for combo in product(*ranges):
            out.append(Counter({a: c for a, c in zip(symbols, combo) if c}))
        return out
    out = []
    for combo in product(*[range(caps.get(a, 0) + 1) for a in symbols]):
        w = Counter({a: c for a, c in zip(symbols, combo) if c})
        if _rbe.bag_matches(delta, w):
            out.append(w)
    return out


def _connected(n_nodes, edges):
    if n_nodes <= 1:
        return True
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, _, b, _ in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = {find(i) for i in range(n_nodes)}
    return len(roots) == 1


def canonical_code(g: Graph):
    """Isomorphism-invariant code: color refinement, then the minimum edge
    list over node orders consistent with the refined cells."""
    nodes = list(g.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    edges = [(index[e.source], e.label, index[e.target], (e.occur.min, e.occur.max)) for e in g.edges]
    colors = {
        i: (
            tuple(sorted((lab, card) for a, lab, b, card in edges if a == i)),
            tuple(sorted((lab, card) for a, lab, b, card in edges if b == i)),
        )
        for i in range(len(nodes))
    }
    for _ in range(len(nodes)):
        nxt = {}
        for i in range(len(nodes)):
            nxt[i] = (
                colors[i],
                tuple(sorted((lab, card, colors[b]) for a, lab, b, card in edges if a == i)),
                tuple(sorted((lab, card, colors[a]) for a, lab, b, card in edges if b == i)),
            )
        if len(set(nxt.values())) == len(set(colors.values())):
            colors = nxt
            break
        colors = nxt
    cells: dict = {}
    for i in range(len(nodes)):
        cells.setdefault(colors[i], []).append(i)
    ordered_cells = [cells[c] for c in sorted(cells, key=repr)]

    best = None
    for perm_parts in product(*[permutations(cell) for cell in ordered_cells]):
        order = [i for part in perm_parts for i in part]
        pos = {i: p for p, i in enumerate(order)}
        code = tuple(sorted((pos[a], lab, pos[b], card) for a, lab, b, card in edges))
        if best is None or code < best:
            best = code
    return (len(nodes), best)


class _CachedTyper:
    """Maximal-typing computation whose per-node satisfaction checks are
    memoized on the out-neighborhood shape, shared across candidates."""

    def __init__(self, s: Schema):
        self.s = s
        self.cache: dict = {}

    def fails(self, g: Graph) -> bool:
        """True iff some node ends up untyped (early exit: type sets only
        shrink, so an empty set is final)."""
        typing = {n: frozenset(self.s.types) for n in g.nodes}
        while True:
            nxt = {}
            for n in g.nodes:
                key = tuple(
                    sorted(
                        (e.label, typing[e.target], e.occur.min) for e in g.out(n)
                    )
                )
                kept = []
                for t in typing[n]:
                    ck = (t, key)
                    r = self.cache.get(ck)
                    if r is None:
                        r = _val.satisfies_type(g, self.s, typing, n, t)
                        self.cache[ck] = r
                    if r:
                        kept.append(t)
                if not kept:
                    return True
                nxt[n] = frozenset(kept)
            if nxt == typing:
                return False
            typing = nxt


def find_counterexample(h: Schema, k: Schema, budget: Budget = Budget()):
    """Exhaustive bounded search for a graph validating h but not k.

    Candidates are generated from h: each node gets one h-type and an
    out-bag from L(δ(type)) realized as edges with cardinalities up to
    budget.max_card, so every candidate validates h by construction (and is
    re-verified).  Only weakly connected candidates are considered — a
    minimal counter-example is connected, since validity is per-node and a
    failing node's component is itself a counter-example.

    Note the one-type-per-node generation: graphs needing a node to be read
    under different types by different referers are not enumerated.  Within
    this space the search is exhaustive and the reported witness has minimal
    node count.
    """
    budget.check()
    start = time.monotonic()
    types = h.types
    typer = _CachedTyper(k)

    def timed_out():
        return budget.timeout is not None and time.monotonic() - start > budget.timeout

    for n_nodes in range(1, budget.max_nodes + 1):
        hits = []
        for counts in _compositions(n_nodes, len(types)):
            node_type = []
            for t, c in zip(types, counts):
                node_type.extend([t] * c)
            targets_of = {t: [i for i, tt in enumerate(node_type) if tt == t] for t in types}
            specs = {}
            feasible = True
            for t, c in zip(types, counts):
                if c == 0:
                    continue
                caps = {
                    a: budget.max_card * len(targets_of[a[1]])
                    for a in _rbe.alphabet(h.defs[t])
                }
                spec_list = []
                for w in _bags_matching(h.defs[t], caps):
                    symbols = sorted(w, key=str)
                    dists = [
                        list(_distributions(w[a], len(targets_of[a[1]]), budget.max_card))
                        for a in symbols
                    ]
                    for combo in product(*dists):
                        spec_list.append(tuple(zip(symbols, combo)))
                if not spec_list:
                    feasible = False
                    break
                specs[t] = spec_list
            if not feasible:
                continue

            group_choices = []
            for t, c in zip(types, counts):
                if c == 0:
                    continue
                group_choices.append(
                    (targets_of[t], list(combinations_with_replacement(range(len(specs[t])), c)))
                )
            for picks in product(*[choices for _, choices in group_choices]):
                if timed_out():
                    if hits:
                        break
                    return Unknown("timeout before exhausting the budget")
                edges = []
                for (members, _), pick in zip(group_choices, picks):
                    t = node_type[members[0]]
                    for node_i, spec_i in zip(members, pick):
                        for (lab, tgt_t), dist in specs[t][spec_i]:
                            for slot, card in enumerate(dist):
                                if card:
                                    edges.append((node_i, lab, targets_of[tgt_t][slot], card))
                if not _connected(n_nodes, edges):
                    continue
                names = [f"v{i}" for i in range(n_nodes)]
                kind = "compressed" if any(c > 1 for *_, c in edges) else "simple"
                g = Graph(
                    names,
                    [Edge(names[a], lab, names[b], Interval(c, c)) for a, lab, b, c in edges],
                    kind=kind,
                )
                if typer.fails(g):
                    # Independent re-verification before reporting.
                    if _val.validates(g, h) and not _val.validates(g, k):
                        total_card = sum(c for *_, c in edges)
                        hits.append((total_card, g))
            if hits and timed_out():
                break
        if hits:
            best = min(hits, key=lambda tc_g: (tc_g[0], canonical_code(tc_g[1])))
            return NotContained(best[1])
        if timed_out():
            return Unknown("timeout before exhausting the budget")
    if budget.claim_complete:
        return Contained()
    return Unknown(
        f"no counter-example with <= {budget.max_nodes} nodes and cardinalities <= {budget.max_card}"
    )


# --- Front-door decision ------------------------------------------------------


def contains(h: Schema, k: Schema, method: str = "auto", budget: Budget = Budget()):
    """Containment verdict; method 'embedding' requires both schemas in the
    deterministic ?-closed class, 'search' runs the bounded enumeration,
    'auto' picks embedding exactly when both classify into that class."""
    if method not in ("auto", "embedding", "search"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        both_minus = (
            classify(h)[0] == SchemaClass.DetShEx0Minus
            and classify(k)[0] == SchemaClass.DetShEx0Minus
        )
        method = "embedding" if both_minus else "search"
    if method == "embedding":
        if contains_detshex0minus(h, k):
            return Contained()
        witness = characterizing_graph(h)
        if _val.validates(witness, h) and not _val.validates(witness, k):
            return NotContained(witness)
        fallback = find_counterexample(h, k, budget)
        if isinstance(fallback, NotContained):
            return fallback
        return Unknown("embedding refuted containment but no witness materialized")
    return find_counterexample(h, k, budget)
