from __future__ import annotations

import random

import pytest

from catrew.core import (
    EMPTY_GRAPH, GRAPH, SGRAPH, FinGraph, GraphMorphism, canonical_form,
    compose, enumerate_graphs, enumerate_morphisms, find_isomorphism, identity,
    m_subobjects,
)
from catrew.composition import enumerate_rule_matches, rule_match_key
from catrew.multi import mipc_equivalent, multi_ipc, multi_sum
from catrew.rewriting import (
    DPO, GENERIC, LINEAR, SQPO, Match, Rule, SemanticsTag, apply,
    enumerate_matches, identity_rule,
)
from catrew.universal import FPC, PULLBACK, Cospan, Span, classify_square, fpc
from catrew.verification import (
    FIBRATION_KINDS, PASTING_KINDS, TwoStepDerivation, analyze,
    associativity_check, check_fibration_instance, check_pasting_instance,
    families_equal, fpc_universal_spot_check, generate,
    generate_fibration_instance, generate_graph, generate_rule,
    generate_two_step, oracle_multisum, oracle_pushout_complements, synthesize,
)
from tests.test_rewriting import clone_rule


ALL_CELLS = [
    (GRAPH, SemanticsTag(DPO, LINEAR)),
    (GRAPH, SemanticsTag(DPO, GENERIC)),
    (GRAPH, SemanticsTag(SQPO, GENERIC)),
    (SGRAPH, SemanticsTag(DPO, LINEAR)),
    (SGRAPH, SemanticsTag(SQPO, GENERIC)),
]


class TestRoundtrip:
    @pytest.mark.parametrize("ctx,tag", ALL_CELLS,
                             ids=lambda v: getattr(v, "kind", None) or f"{v.base}-{v.rule_class}")
    def test_synthesize_analyze(self, ctx, tag):
        hits = 0
        for seed in range(10):
            ts = generate_two_step(seed, (3, 3), tag, ctx, attempts=25)
            if ts is None:
                continue
            sr = synthesize(ts, tag, ctx)
            assert sr.derivation.result == ts.second.result
            back = analyze(sr.composite, sr.derivation, ctx)
            assert find_isomorphism(back.first.result, ts.first.result) is not None
            assert find_isomorphism(back.second.result, ts.second.result) is not None
            hits += 1
        assert hits >= 5

    def test_identity_two_step(self, e2):
        tag = SemanticsTag(SQPO, GENERIC)
        r = identity_rule(e2)
        d1 = apply(r, Match(identity(e2)), tag, GRAPH)
        r2 = identity_rule(d1.result)
        d2 = apply(r2, Match(identity(d1.result)), tag, GRAPH)
        sr = synthesize(TwoStepDerivation(d1, d2), tag, GRAPH)
        assert find_isomorphism(sr.derivation.result, e2) is not None
        # composite of two identity rules is an identity-shaped span
        comp = sr.composite.composite
        assert find_isomorphism(comp.context, comp.input) is not None

    def test_synthesis_match_in_enumerated_class(self):
        # the extracted rule match coincides with a member of the
        # enumerated family, up to the compatible-isomorphism quotient
        tag = SemanticsTag(SQPO, GENERIC)
        ts = generate_two_step(3, (3, 3), tag, GRAPH, attempts=25)
        sr = synthesize(ts, tag, GRAPH)
        r2, r1 = ts.second.rule, ts.first.rule
        key = rule_match_key(r2, r1, sr.rule_match)
        family = enumerate_rule_matches(r2, r1, tag, GRAPH, family_cap=4000)
        assert key in {rule_match_key(r2, r1, mu) for mu in family}


class TestOracles:
    def test_mipc_matches_oracle_cloning(self, dot, l1):
        k = FinGraph(["k1", "k2"], {})
        f = GraphMorphism(k, dot, {"k1": "v", "k2": "v"}, {})
        beta = GraphMorphism(dot, l1, {"v": "u"}, {})
        fast = multi_ipc(f, beta, GRAPH)
        slow = oracle_pushout_complements(f, beta, (2, 1), GRAPH)
        assert families_equal(fast, slow, mipc_equivalent)
        assert len(fast) == 4

    def test_mipc_matches_oracle_sweep(self):
        rng = random.Random(21)
        for ctx in (GRAPH, SGRAPH):
            checked = 0
            while checked < 12:
                a = generate_graph(rng, (2, 1), ctx)
                from catrew.verification import generate_morphism_from, _m_extension
                f = generate_morphism_from(rng, a, ctx, extra=(1, 1))
                beta = _m_extension(rng, f.cod, ctx, extra=(1, 1))
                fast = multi_ipc(f, beta, ctx)
                max_v = max([len(e.alpha.cod.vertices) for e in fast] or [0])
                max_e = max([len(e.alpha.cod.edges) for e in fast] or [0])
                bound = (max(max_v, len(beta.cod.vertices)),
                         max(max_e, len(beta.cod.edges) + 1))
                if bound[0] > 4 or bound[1] > 4:
                    continue
                slow = oracle_pushout_complements(f, beta, bound, ctx)
                assert families_equal(fast, slow, mipc_equivalent), (ctx.kind, f, beta)
                checked += 1

    def test_multisum_matches_oracle(self, dot):
        for ctx, expected in ((GRAPH, 2), (SGRAPH, 5)):
            fast = multi_sum(dot, dot, ctx)
            slow = oracle_multisum(dot, dot, (4, 4), ctx)
            assert len(fast) == expected
            fast_keys = {canonical_form(el.target) for el in fast}
            slow_keys = {canonical_form(el.target) for el in slow}
            assert len(slow) == expected
            assert fast_keys == slow_keys

    def test_multisum_matches_oracle_edge_overlap(self, e2):
        fast = multi_sum(e2, e2, GRAPH)
        slow = oracle_multisum(e2, e2, (4, 2), GRAPH)
        assert len(fast) == len(slow)


class TestAssociativity:
    def test_identity_triple(self):
        unit = identity_rule(EMPTY_GRAPH)
        for tag in (SemanticsTag(DPO, GENERIC), SemanticsTag(SQPO, GENERIC)):
            rep = associativity_check(unit, unit, unit, tag, GRAPH)
            assert rep.equal and sum(rep.left_classes.values()) == 1

    def test_vertex_creation_triple(self):
        dotg = FinGraph(["o"], {})
        create = Rule(GraphMorphism(EMPTY_GRAPH, dotg, {}, {}),
                      GraphMorphism(EMPTY_GRAPH, EMPTY_GRAPH, {}, {}))
        for tag in (SemanticsTag(SQPO, LINEAR), SemanticsTag(DPO, LINEAR)):
            rep = associativity_check(create, create, create, tag, GRAPH)
            assert rep.equal

    @pytest.mark.parametrize("ctx,tag", ALL_CELLS,
                             ids=lambda v: getattr(v, "kind", None) or f"{v.base}-{v.rule_class}")
    def test_random_triples(self, ctx, tag):
        done = 0
        for seed in range(8):
            rng = random.Random(seed * 31 + 7)
            rules = [generate_rule(rng, (2, 1), ctx, tag.rule_class)
                     for _ in range(3)]
            rep = associativity_check(rules[0], rules[1], rules[2], tag, ctx,
                                      cap=2000, family_cap=400)
            if not rep.complete:
                continue
            assert rep.equal, (ctx.kind, tag, seed)
            done += 1
        assert done >= 3


class TestFpcSpotCheck:
    def test_clone_square(self, dot, l1):
        k = FinGraph(["k1", "k2"], {})
        f = GraphMorphism(k, dot, {"k1": "v", "k2": "v"}, {})
        m = GraphMorphism(dot, l1, {"v": "u"}, {})
        _, _, sq = fpc(f, m, GRAPH)
        assert fpc_universal_spot_check(sq, GRAPH)

    def test_random_squares(self):
        rng = random.Random(17)
        from catrew.verification import generate_morphism_from, _m_extension
        for ctx in (GRAPH, SGRAPH):
            for seed in range(6):
                a = generate_graph(rng, (2, 1), ctx)
                f = generate_morphism_from(rng, a, ctx, extra=(1, 1))
                m = _m_extension(rng, f.cod, ctx, extra=(1, 1))
                _, _, sq = fpc(f, m, ctx)
                assert fpc_universal_spot_check(sq, ctx, seed=seed)


class TestFibrationSuite:
    @pytest.mark.parametrize("kind", FIBRATION_KINDS)
    def test_instances_hold(self, kind):
        for ctx in (GRAPH, SGRAPH):
            if kind in ("bcc1", "bcc2") and ctx.is_simple:
                continue
            checked = 0
            seed = 0
            while checked < 8 and seed < 80:
                inst = generate_fibration_instance(kind, seed, ctx)
                seed += 1
                if inst is None:
                    continue
                assert check_fibration_instance(kind, inst, ctx), (kind, ctx.kind, seed)
                checked += 1
            assert checked >= 4


class TestPastingSuite:
    @pytest.mark.parametrize("kind", PASTING_KINDS)
    def test_instances_hold(self, kind):
        for ctx in (GRAPH, SGRAPH):
            checked = 0
            seed = 0
            while checked < 10 and seed < 60:
                res = check_pasting_instance(kind, seed, ctx)
                seed += 1
                if res is None:
                    continue
                assert res, (kind, ctx.kind, seed)
                checked += 1
            assert checked >= 5


class TestGenerate:
    def test_deterministic(self):
        g1 = generate("graph", 42, (3, 3), GRAPH)
        g2 = generate("graph", 42, (3, 3), GRAPH)
        assert g1 == g2
        r1 = generate("rule", 7, (3, 3), SGRAPH, linearity=LINEAR)
        r2 = generate("rule", 7, (3, 3), SGRAPH, linearity=LINEAR)
        assert r1 == r2

    def test_rule_linearity_postcondition(self):
        for seed in range(12):
            r = generate("rule", seed, (3, 3), GRAPH, linearity="input_linear")
            assert GRAPH.is_m(r.input_morphism)
            r = generate("rule", seed, (3, 3), SGRAPH, linearity=LINEAR)
            assert SGRAPH.is_m(r.input_morphism) and SGRAPH.is_m(r.output_morphism)

    def test_graphs_satisfy_invariants(self):
        for seed in range(200):
            g = generate("graph", seed, (4, 4), SGRAPH)
            SGRAPH.validate_graph(g)

    def test_square_premise(self):
        sp = generate("square_premise", 3, (3, 2), GRAPH)
        assert sp.left.dom == sp.right.dom
