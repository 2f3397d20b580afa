import random
from collections import Counter

import pytest

from shapegraph import (
    Budget,
    CnfFormula,
    Contained,
    NotContained,
    SchemaClass,
    classify,
    cnf_satisfiable,
    dnf_containment_instance,
    dnf_tautology,
    embeds,
    exponential_family,
    find_counterexample,
    normalize_cnf,
    sat_embedding_instance,
    union_containment_instance,
    validates,
)
from shapegraph.errors import ShapegraphError
from shapegraph.rbe import bag_matches, parse_rbe

from conftest import random_flat_rbe


class TestNormalization:
    def test_adds_missing_polarity(self):
        phi = normalize_cnf(CnfFormula(2, ((1, 2),)))
        assert phi.is_normalized
        pos, neg = phi.counts()
        assert all(neg[i] >= 1 for i in neg)

    def test_preserves_satisfiability(self):
        rng = random.Random(67)
        for _ in range(80):
            n = rng.randint(1, 3)
            clauses = tuple(
                tuple(
                    rng.choice([i, -i])
                    for i in rng.sample(range(1, n + 1), rng.randint(1, n))
                )
                for _ in range(rng.randint(1, 3))
            )
            phi = CnfFormula(n, clauses)
            norm = normalize_cnf(phi)
            assert norm.is_normalized
            assert cnf_satisfiable(phi) == cnf_satisfiable(norm)

    def test_unsat_example(self):
        phi = normalize_cnf(CnfFormula(1, ((1,), (-1,))))
        assert not cnf_satisfiable(phi)


class TestSatInstance:
    def test_requires_normal_form(self):
        with pytest.raises(ShapegraphError):
            sat_embedding_instance(CnfFormula(1, ((1,),)))

    def test_instances_are_general_interval_graphs(self):
        phi = normalize_cnf(CnfFormula(2, ((1, -2), (-1, 2))))
        h, k = sat_embedding_instance(phi)
        assert h.kind == "general" and k.kind == "general"
        assert not all(e.occur.basic for e in h.edges)

    def test_fidelity_spot_checks(self):
        for clauses, n in (
            (((1,), (-1,)), 1),  # unsatisfiable
            (((1, -2), (-1, 2)), 2),  # satisfiable
            (((1,), (-1, 2), (-2,)), 2),  # unsatisfiable
        ):
            phi = normalize_cnf(CnfFormula(n, clauses))
            h, k = sat_embedding_instance(phi)
            ok, _ = embeds(h, k)
            assert ok == cnf_satisfiable(phi), clauses


class TestDnfInstance:
    def test_classification(self):
        h, k = dnf_containment_instance(2, ((1, -2),))
        for s in (h, k):
            cls, _ = classify(s)
            assert cls == SchemaClass.DetShEx0

    def test_fidelity_spot_checks(self):
        budget = Budget(max_nodes=6, max_card=1, timeout=60, claim_complete=True)
        taut = ((1,), (-1,))
        non = ((1, 2),)
        h, k = dnf_containment_instance(2, taut)
        assert isinstance(find_counterexample(h, k, budget), Contained)
        h, k = dnf_containment_instance(2, non)
        v = find_counterexample(h, k, budget)
        assert isinstance(v, NotContained)
        assert validates(v.witness, h) and not validates(v.witness, k)


class TestExponentialFamily:
    def test_classification(self):
        h, k = exponential_family(2)
        assert classify(h)[0].at_least(SchemaClass.ShEx0)
        assert classify(k)[0] == SchemaClass.ShEx0

    def test_minimal_counterexample_n1(self):
        h, k = exponential_family(1)
        v = find_counterexample(h, k, Budget(max_nodes=6, max_card=1, timeout=120))
        assert isinstance(v, NotContained)
        assert len(v.witness.nodes) == 4
        assert validates(v.witness, h) and not validates(v.witness, k)


class TestUnionInstance:
    def bag_language_contained(self, e0, es, symbols, max_size=4):
        from itertools import product

        def ok(e, w):
            try:
                return bag_matches(e, w)
            except ShapegraphError:
                return False

        for combo in product(range(max_size + 1), repeat=len(symbols)):
            w = Counter({s: c for s, c in zip(symbols, combo) if c})
            if sum(w.values()) > max_size:
                continue
            if ok(e0, w) and not any(ok(e, w) for e in es):
                return False
        return True

    def test_contained_case(self):
        e0 = parse_rbe("a | b")
        es = [parse_rbe("a"), parse_rbe("b")]
        h, k = union_containment_instance(e0, es)
        v = find_counterexample(h, k, Budget(max_nodes=4, max_card=3, claim_complete=True))
        assert isinstance(v, Contained)
        assert self.bag_language_contained(e0, es, ("a", "b"))

    def test_not_contained_case(self):
        e0 = parse_rbe("a*")
        es = [parse_rbe("a?")]
        h, k = union_containment_instance(e0, es)
        v = find_counterexample(h, k, Budget(max_nodes=4, max_card=3))
        assert isinstance(v, NotContained)
        assert not self.bag_language_contained(e0, es, ("a",))

    def test_random_agreement(self):
        rng = random.Random(71)
        checked = 0
        for _ in range(25):
            e0 = random_flat_rbe(rng, symbols=("a", "b"), depth=2)
            es = [random_flat_rbe(rng, symbols=("a", "b"), depth=2) for _ in range(2)]
            h, k = union_containment_instance(e0, es)
            v = find_counterexample(h, k, Budget(max_nodes=4, max_card=4, timeout=30))
            oracle = self.bag_language_contained(e0, es, ("a", "b"), max_size=4)
            if isinstance(v, NotContained):
                assert not self.bag_language_contained(e0, es, ("a", "b"), max_size=8)
                checked += 1
            elif oracle is False:
                # A counter-example exists with a small bag; the bounded
                # search must find one (bags of size <= 4 fit the budget).
                assert isinstance(v, NotContained)
        assert checked >= 3
