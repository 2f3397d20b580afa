"""Simulations and embeddings between graphs.

A simulation relates nodes of G to nodes of H so that each related pair
(n, m) carries a witness: a total map λ from out-edges of n to out-edges of
m that preserves labels, sends targets to related pairs, and for every
out-edge f of m keeps the interval sum of λ's preimage inside occur(f).

Witness existence is abstracted as a flow-routing problem over bipartite
sources (out-edges of n) and sinks (out-edges of m).  For basic intervals
it is decided in polynomial time by augmenting paths; the residual moves
are exactly the push-forth edges (evict a source from a saturated or
overflowing sink) and pull-back edges (draw a min-1 source into a sink in
deficit).  For arbitrary intervals an exact backtracking search is used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import INF, Graph, Interval, interval_sum
from .errors import ClassPreconditionError, WorkCapError


@dataclass(frozen=True)
class RoutingInstance:
    """Sources/sinks are (id, interval) pairs; allowed ⊆ source ids × sink ids."""

    sources: tuple
    sinks: tuple
    allowed: frozenset

    def source_interval(self, v):
        return dict(self.sources)[v]

    def sink_interval(self, u):
        return dict(self.sinks)[u]


def verify_routing(inst: RoutingInstance, lam: dict) -> bool:
    """Independent check that lam is a valid total routing for inst."""
    sink_ivs = dict(inst.sinks)
    if set(lam) != {v for v, _ in inst.sources}:
        return False
    inflow = {u: [] for u, _ in inst.sinks}
    for v, iv in inst.sources:
        u = lam[v]
        if (v, u) not in inst.allowed or u not in inflow:
            return False
        inflow[u].append(iv)
    return all(interval_sum(inflow[u]).subset(sink_ivs[u]) for u in inflow)


# --- Basic intervals: polynomial routing ------------------------------------
#
# With basic intervals and the "w.l.o.g." pass dropping allowed pairs whose
# source max exceeds the sink max, the constraints reduce to: a max-1 sink
# holds at most one source (else it overflows), and a min-1 sink must hold at
# least one min-1 source (else it is in deficit).  That is a degree-
# constrained assignment, solved by shortest augmenting paths in a residual
# network whose edges are the push-forth and pull-back moves; per-sink
# strong demands appear as lower bounds.


class _Network:
    """Unit-capacity-style max flow (shortest augmenting paths)."""

    def __init__(self, n):
        self.adj = [[] for _ in range(n)]

    def add(self, a, b, cap):
        self.adj[a].append([b, cap, len(self.adj[b])])
        self.adj[b].append([a, 0, len(self.adj[a]) - 1])
        return len(self.adj[a]) - 1

    def maxflow(self, s, t):
        total = 0
        while True:
            prev = {s: None}
            queue = deque([s])
            while queue and t not in prev:
                x = queue.popleft()
                for i, (y, cap, _) in enumerate(self.adj[x]):
                    if cap > 0 and y not in prev:
                        prev[y] = (x, i)
                        queue.append(y)
            if t not in prev:
                return total
            # Bottleneck along the path, then apply.
            path = []
            y = t
            while prev[y] is not None:
                x, i = prev[y]
                path.append((x, i))
                y = x
            amount = min(self.adj[x][i][1] for x, i in path)
            for x, i in path:
                edge = self.adj[x][i]
                edge[1] -= amount
                self.adj[edge[0]][edge[2]][1] += amount
            total += amount


def witness_exists_basic(inst: RoutingInstance):
    """Routing λ for a basic-interval instance, or None when infeasible."""
    for _, iv in inst.sources + inst.sinks:
        if not iv.basic:
            raise ClassPreconditionError(f"non-basic interval {iv} in routing instance")

    src_iv = dict(inst.sources)
    sink_iv = dict(inst.sinks)
    # Preprocessing per the proof: drop pairs with v.max > u.max, then fail
    # any source left without an admissible sink.
    allowed = {
        (v, u)
        for (v, u) in inst.allowed
        if v in src_iv and u in sink_iv and src_iv[v].max <= sink_iv[u].max
    }
    by_source = {v: [] for v, _ in inst.sources}
    for v, _ in inst.sources:
        for u, _ in inst.sinks:
            if (v, u) in allowed:
                by_source[v].append(u)
    if any(not opts for opts in by_source.values()):
        return None

    n_v = len(inst.sources)
    min1 = [u for u, iv in inst.sinks if iv.min == 1]
    big = n_v + len(inst.sinks) + 1

    S, T, SS, TT = 0, 1, 2, 3
    vnode = {v: 4 + i for i, (v, _) in enumerate(inst.sources)}
    unode = {u: 4 + n_v + j for j, (u, _) in enumerate(inst.sinks)}
    gate = {u: 4 + n_v + len(inst.sinks) + j for j, u in enumerate(min1)}
    net = _Network(4 + n_v + len(inst.sinks) + len(min1))

    for v, _ in inst.sources:
        net.add(SS, vnode[v], 1)
    for u in min1:
        cap_u = 1 if sink_iv[u].max == 1 else big
        net.add(SS, unode[u], 1)
        net.add(gate[u], TT, 1)
        net.add(gate[u], unode[u], cap_u - 1)
    net.add(S, TT, n_v)
    for u, iv in inst.sinks:
        net.add(unode[u], T, 1 if iv.max == 1 else big)
    net.add(T, S, big)
    choice_edges = {}
    for v, _ in inst.sources:
        for u in by_source[v]:
            target = gate[u] if sink_iv[u].min == 1 and src_iv[v].min == 1 else unode[u]
            choice_edges[(v, u)] = net.add(vnode[v], target, 1)

    if net.maxflow(SS, TT) != n_v + len(min1):
        return None
    lam = {}
    for (v, u), i in choice_edges.items():
        if net.adj[vnode[v]][i][1] == 0:  # the unit capacity was used
            lam[v] = u
    assert verify_routing(inst, lam), "routing extraction produced an invalid witness"
    return lam


# --- Arbitrary intervals: exact search --------------------------------------


DEFAULT_ROUTING_CAP = 10**6


def witness_exists_general(inst: RoutingInstance, work_cap: int = DEFAULT_ROUTING_CAP):
    """Exact backtracking over source→sink assignments, or None.

    Prunes on the running interval sum per sink (max side monotone) and on
    the remaining min-potential of each min-constrained sink; identical
    sources are assigned in nondecreasing sink order to skip symmetric
    permutations.
    """
    sinks = list(inst.sinks)
    sink_pos = {u: j for j, (u, _) in enumerate(sinks)}
    options = []
    for v, iv in inst.sources:
        opts = tuple(
            j for j, (u, _) in enumerate(sinks) if (v, u) in inst.allowed
        )
        if not opts:
            return None
        options.append((v, iv, opts))
    # Fewest-options first; identical sources adjacent for symmetry breaking.
    options.sort(key=lambda t: (len(t[2]), t[2], (t[1].min, t[1].max), str(t[0])))

    sum_min = [0] * len(sinks)
    sum_max = [0] * len(sinks)
    potential = [0] * len(sinks)
    for _, iv, opts in options:
        for j in opts:
            potential[j] += iv.min
    work = [0]

    def feasible_min(j):
        _, siv = sinks[j]
        return sum_min[j] + potential[j] >= siv.min

    lam = {}

    def solve(k):
        work[0] += 1
        if work[0] > work_cap:
            raise WorkCapError(f"routing search exceeded {work_cap} steps")
        if k == len(options):
            return all(
                siv.min <= sum_min[j] and sum_max[j] <= siv.max
                for j, (_, siv) in enumerate(sinks)
            )
        v, iv, opts = options[k]
        for j in opts:
            potential[j] -= iv.min
        start = 0
        if k and options[k - 1][1:] == (iv, opts):
            start = opts.index(sink_pos[lam[options[k - 1][0]]])
        ok = False
        for j in opts[start:]:
            _, siv = sinks[j]
            old_max = sum_max[j]
            if old_max + iv.max > siv.max:
                continue
            sum_min[j] += iv.min
            sum_max[j] = old_max + iv.max
            lam[v] = sinks[j][0]
            if all(feasible_min(jj) for jj in opts):
                if solve(k + 1):
                    ok = True
            sum_min[j] -= iv.min
            sum_max[j] = old_max
            if ok:
                break
            del lam[v]
        for j in opts:
            potential[j] += iv.min
        return ok

    if solve(0):
        result = dict(lam)
        assert verify_routing(inst, result), "backtracking produced an invalid witness"
        return result
    return None


# --- Simulations ------------------------------------------------------------


@dataclass(frozen=True)
class SimulationRelation:
    """Pairs (g-node, h-node) with one witness per pair.

    A witness maps out-edge indexes of the g-node to out-edge indexes of the
    h-node (indexes into Graph.out of the respective node).
    """

    pairs: frozenset
    witnesses: dict

    def domain(self):
        return {n for n, _ in self.pairs}


def routing_instance(g: Graph, h: Graph, n, m, rel) -> RoutingInstance:
    """The flow-routing instance for witnessing (n, m) under relation rel."""
    g_out = g.out(n)
    h_out = h.out(m)
    sources = tuple((i, e.occur) for i, e in enumerate(g_out))
    sinks = tuple((j, f.occur) for j, f in enumerate(h_out))
    allowed = frozenset(
        (i, j)
        for i, e in enumerate(g_out)
        for j, f in enumerate(h_out)
        if e.label == f.label and (e.target, f.target) in rel
    )
    return RoutingInstance(sources, sinks, allowed)


def find_witness(inst: RoutingInstance, work_cap: int = DEFAULT_ROUTING_CAP):
    basic = all(iv.basic for _, iv in inst.sources + inst.sinks)
    if basic:
        return witness_exists_basic(inst)
    return witness_exists_general(inst, work_cap=work_cap)


def max_simulation(g: Graph, h: Graph) -> SimulationRelation:
    """The greatest simulation of g in h, with a witness per surviving pair.

    Starts from all pairs and removes witness-less pairs round by round over
    a snapshot of the previous round, until a fixed point.
    """
    rel = {(n, m) for n in g.nodes for m in h.nodes}
    while True:
        removed = set()
        for n in g.nodes:
            for m in h.nodes:
                if (n, m) not in rel:
                    continue
                if find_witness(routing_instance(g, h, n, m, rel)) is None:
                    removed.add((n, m))
        if not removed:
            break
        rel -= removed
    witnesses = {}
    for n in g.nodes:
        for m in h.nodes:
            if (n, m) in rel:
                lam = find_witness(routing_instance(g, h, n, m, rel))
                assert lam is not None
                witnesses[(n, m)] = lam
    return SimulationRelation(frozenset(rel), witnesses)


def embeds(g: Graph, h: Graph):
    """(g ≼ h, the maximal simulation)."""
    sim = max_simulation(g, h)
    return sim.domain() == set(g.nodes), sim


def verify_witness(g: Graph, h: Graph, sim: SimulationRelation) -> bool:
    """Check the three witness conditions for every pair, independently of
    how the witnesses were found."""
    for (n, m), lam in sim.witnesses.items():
        if (n, m) not in sim.pairs:
            return False
        g_out = g.out(n)
        h_out = h.out(m)
        if set(lam) != set(range(len(g_out))):
            return False
        inflow = {j: [] for j in range(len(h_out))}
        for i, j in lam.items():
            e, f = g_out[i], h_out[j]
            if e.label != f.label or (e.target, f.target) not in sim.pairs:
                return False
            inflow[j].append(e.occur)
        for j, f in enumerate(h_out):
            if not interval_sum(inflow[j]).subset(f.occur):
                return False
    return sim.pairs == set(sim.witnesses)
