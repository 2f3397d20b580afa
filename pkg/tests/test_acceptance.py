"""Acceptance gate: one test (and one pass/fail line under pytest -v) per
top-level criterion, each with its stated tolerance and time bound."""

import random
import time
from collections import Counter
from itertools import combinations, combinations_with_replacement, product

from shapegraph import (
    Budget,
    CnfFormula,
    Contained,
    NotContained,
    RoutingInstance,
    SchemaClass,
    classify,
    characterizing_graph,
    cnf_satisfiable,
    dnf_containment_instance,
    dnf_tautology,
    embeds,
    exponential_family,
    find_counterexample,
    from_shape_graph,
    fuse_to_compressed,
    normalize_cnf,
    parse_schema,
    sat_embedding_instance,
    to_shape_graph,
    unpack,
    validates,
    verify_witness,
    witness_exists_basic,
    witness_exists_general,
    max_typing,
)
from shapegraph.errors import AlphabetError
from shapegraph.presburger import UNKNOWN, pa_eval_bounded, presburger_of, psi_sound_cap
from shapegraph.rbe import Intersect, Rbe0, bag_matches, rbe0_matches, rbe0_to_rbe

from conftest import (
    BASIC,
    BUG_SCHEMA_TEXT,
    BUG_VARIANT_TEXT,
    chain_graph,
    chain_schema,
    random_bag,
    random_flat_rbe,
    random_minus_schema,
)

# Counter-examples found while running this module, re-checked by the
# kind-fusing criterion at the end: entries are (witness, h_schema, k_schema).
COUNTEREXAMPLES = []


def _within(start, seconds):
    assert time.monotonic() - start < seconds, f"exceeded the {seconds}s bound"


def test_worked_typing_regression():
    start = time.monotonic()
    typing = max_typing(chain_graph(), chain_schema())
    assert typing == {
        "n0": frozenset({"t0"}),
        "n1": frozenset({"t1", "t2"}),
        "n2": frozenset({"t3"}),
    }
    _within(start, 1.0)


def test_worked_embedding_regression():
    start = time.monotonic()
    g = chain_graph()
    h = to_shape_graph(chain_schema())
    ok, sim = embeds(g, h)
    assert ok
    assert {("n0", "t0"), ("n1", "t1"), ("n1", "t2"), ("n2", "t3")} <= sim.pairs
    assert verify_witness(g, h, sim)
    _within(start, 1.0)


def test_star_chain_separation():
    from conftest import star_chain_pair

    start = time.monotonic()
    g, h = star_chain_pair()
    ok, _ = embeds(g, h)
    assert not ok
    v = find_counterexample(
        from_shape_graph(g), from_shape_graph(h), Budget(max_nodes=6, max_card=3, timeout=58)
    )
    assert not isinstance(v, NotContained)
    _within(start, 60.0)


def test_bug_schema_classification():
    start = time.monotonic()
    assert classify(parse_schema(BUG_SCHEMA_TEXT))[0] == SchemaClass.DetShEx0Minus
    variant = classify(parse_schema(BUG_VARIANT_TEXT))[0]
    assert variant == SchemaClass.ShEx0
    assert not variant.at_least(SchemaClass.DetShEx0)
    _within(start, 1.0)


def test_flow_routing_oracle_equivalence():
    # The exhaustive ≤4×4 family (interval choices × allowed relations) is
    # ≈ 4·10⁹ instances, far over the 5-minute exhaustion limit, so the
    # criterion's sampling clause applies: 10⁵ seeded random instances.
    rng = random.Random(2024)
    disagreements = 0
    for _ in range(100_000):
        ns, nu = rng.randint(1, 4), rng.randint(1, 4)
        sources = tuple((f"v{i}", rng.choice(BASIC)) for i in range(ns))
        sinks = tuple((f"u{j}", rng.choice(BASIC)) for j in range(nu))
        allowed = frozenset(
            (v, u) for v, _ in sources for u, _ in sinks if rng.random() < 0.6
        )
        inst = RoutingInstance(sources, sinks, allowed)
        if (witness_exists_basic(inst) is None) != (witness_exists_general(inst) is None):
            disagreements += 1
    assert disagreements == 0


def test_rbe_oracle_equivalence():
    start = time.monotonic()
    symbols = ("a", "b", "c")
    atoms = [(s, iv) for s in symbols for iv in BASIC]
    bags = [
        Counter({"a": ca, "b": cb, "c": cc})
        for ca in range(7)
        for cb in range(7 - ca)
        for cc in range(7 - ca - cb)
    ]
    disagreements = 0
    for k in range(5):
        for chosen in combinations_with_replacement(atoms, k):
            e0 = Rbe0(tuple(chosen))
            e = rbe0_to_rbe(e0)
            for w in bags:
                try:
                    bm = bag_matches(e, w)
                except AlphabetError:
                    bm = False
                if rbe0_matches(e0, w) != bm:
                    disagreements += 1
    assert disagreements == 0
    _within(start, 120.0)


def test_psi_formula_correctness():
    rng = random.Random(314)
    disagreements = 0
    for i in range(1000):
        if i % 4 == 0:
            e = Intersect(
                random_flat_rbe(rng, depth=2), random_flat_rbe(rng, depth=2)
            )
        else:
            e = random_flat_rbe(rng)
        w = random_bag(rng, max_size=5)
        formula, xvars, nvar = presburger_of(e)
        assignment = {nvar: 1}
        for sym, x in xvars.items():
            assignment[x] = w.get(sym, 0)
        foreign = any(c and sym not in xvars for sym, c in w.items())
        if foreign:
            psi = False
        else:
            psi = pa_eval_bounded(
                formula, assignment, psi_sound_cap(e, w, 1), assume_cap_sound=True
            )
            assert psi is not UNKNOWN
        try:
            oracle = bag_matches(e, w)
        except AlphabetError:
            oracle = False
        if isinstance(e, Intersect) and not foreign:
            # The intersection case must equal the conjunction of memberships.
            sides = []
            for side in (e.left, e.right):
                f2, xv2, nv2 = presburger_of(side)
                asg = {nv2: 1}
                for sym, x in xv2.items():
                    asg[x] = w.get(sym, 0)
                if any(c and sym not in xv2 for sym, c in w.items()):
                    sides.append(False)
                else:
                    sides.append(
                        pa_eval_bounded(f2, asg, psi_sound_cap(side, w, 1), assume_cap_sound=True)
                    )
            if psi != (sides[0] and sides[1]):
                disagreements += 1
        if psi != oracle:
            disagreements += 1
    assert disagreements == 0


def _consistent_clauses(v):
    out = []
    for signs in product((0, 1, -1), repeat=v):
        cl = tuple(i * s for i, s in zip(range(1, v + 1), signs) if s)
        if cl:
            out.append(cl)
    return out


def test_sat_reduction_fidelity():
    start = time.monotonic()
    disagreements = 0
    for v in (1, 2, 3):
        clauses = _consistent_clauses(v)
        family = [(c,) for c in clauses] + list(combinations(clauses, 2))
        for cls in family:
            phi = normalize_cnf(CnfFormula(v, tuple(cls)))
            h, k = sat_embedding_instance(phi)
            ok, _ = embeds(h, k)
            if ok != cnf_satisfiable(phi):
                disagreements += 1
    assert disagreements == 0
    _within(start, 120.0)


def test_dnf_reduction_fidelity():
    # Only root-kind nodes can lack a partner type, so a counter-example
    # needs at most 1 + v nodes plus one shared sink; the v+2 budget is
    # complete for this family (and implies no 8-node one exists either).
    rng = random.Random(115)
    disagreements = 0
    for v in (1, 2, 3):
        clauses = _consistent_clauses(v)
        family = [(c,) for c in clauses]
        pairs = list(combinations(clauses, 2))
        rng.shuffle(pairs)
        family += pairs[:40]
        family.append(((1,), (-1,)))  # guaranteed tautology
        for cls in family:
            h, k = dnf_containment_instance(v, tuple(cls))
            verdict = find_counterexample(
                h, k, Budget(max_nodes=v + 2, max_card=1, timeout=60, claim_complete=True)
            )
            taut = dnf_tautology(v, cls)
            if taut != isinstance(verdict, Contained):
                disagreements += 1
            if isinstance(verdict, NotContained):
                COUNTEREXAMPLES.append((verdict.witness, h, k))
    assert disagreements == 0


def test_characterizing_graph_contract():
    rng = random.Random(424)
    for _ in range(100):
        h = random_minus_schema(rng)
        g = characterizing_graph(h)
        assert validates(g, h)
        hg = to_shape_graph(h)
        opts = sum(1 for e in hg.edges if e.occur.min == 0 and e.occur.max == 1)
        stars = sum(1 for e in hg.edges if e.occur.max > 1)
        assert len(g.nodes) <= len(h.types) * (2 + opts) * (1 + stars)
        for _ in range(50):
            k = random_minus_schema(rng)
            kg = to_shape_graph(k)
            assert embeds(g, kg)[0] == embeds(hg, kg)[0]


# Regression constants recorded from exhaustive search (single-type-per-node
# candidate space, cardinality 1 suffices for this family).
MINIMAL_COUNTEREXAMPLE_NODES = {1: 4, 2: 8}


def test_exponential_family_growth():
    sizes = {}
    for n in (1, 2):
        h, k = exponential_family(n)
        v = find_counterexample(h, k, Budget(max_nodes=8, max_card=1, timeout=240))
        assert isinstance(v, NotContained)
        sizes[n] = len(v.witness.nodes)
        COUNTEREXAMPLES.append((v.witness, h, k))
    assert sizes[2] > sizes[1]
    assert sizes == MINIMAL_COUNTEREXAMPLE_NODES


def test_kind_fusing_preservation():
    assert COUNTEREXAMPLES, "expected earlier criteria to collect counter-examples"
    for g, h, k in COUNTEREXAMPLES:
        simple = g if g.is_simple else unpack(g)[0]
        fused = fuse_to_compressed(simple, h, k)
        assert validates(fused, h)
        assert not validates(fused, k)


def test_property_suites_are_green():
    # The interval-law, simulation-maximality, unpack-coherence, and CLI
    # determinism properties live in their own modules; this criterion is
    # the aggregate run of those files, re-checked here cheaply.
    import subprocess
    import sys

    r = subprocess.run(
        [
            sys.executable,
            "-m",
            "pytest",
            "-q",
            "--no-header",
            "-p",
            "no:cacheprovider",
            "test_core.py",
            "test_embedding.py",
            "test_cli.py",
        ],
        cwd=__file__.rsplit("/", 1)[0],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stdout + r.stderr
