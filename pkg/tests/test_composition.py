from __future__ import annotations

import pytest

from catrew.core import (
    EMPTY_GRAPH, GRAPH, SGRAPH, FinGraph, GraphMorphism, find_isomorphism,
    identity,
)
from catrew.composition import (
    CompositionWitness, DpoRuleMatch, SqpoRuleMatch, compose_rules,
    enumerate_rule_matches, span_compose,
)
from catrew.rewriting import (
    DPO, GENERIC, LINEAR, SQPO, Rule, SemanticsTag, UnsupportedSemanticsError,
    identity_rule,
)
from catrew.universal import PULLBACK, Span, classify_square
from tests.test_rewriting import clone_rule, contraction_rule


def unit_rule() -> Rule:
    return identity_rule(EMPTY_GRAPH)


def delete_vertex_rule() -> Rule:
    dotg = FinGraph(["i"], {})
    return Rule(GraphMorphism(EMPTY_GRAPH, EMPTY_GRAPH, {}, {}),
                GraphMorphism(EMPTY_GRAPH, dotg, {}, {}))


def add_vertex_rule() -> Rule:
    dotg = FinGraph(["o"], {})
    return Rule(GraphMorphism(EMPTY_GRAPH, dotg, {}, {}),
                GraphMorphism(EMPTY_GRAPH, EMPTY_GRAPH, {}, {}))


def rules_isomorphic(a: Rule, b: Rule) -> bool:
    return a.canonical_key() == b.canonical_key()


class TestSpanCompose:
    def test_identity_span(self, e2):
        s = Span(identity(e2), identity(e2))
        comp, sq = span_compose(s, s, GRAPH)
        assert find_isomorphism(comp.apex, e2) is not None
        assert PULLBACK in classify_square(sq, GRAPH)

    def test_monic_spans_intersect(self, e2, dot):
        sub_a = GraphMorphism(dot, e2, {"v": "a"}, {})
        sub_b = GraphMorphism(dot, e2, {"v": "b"}, {})
        s2 = Span(identity(dot), sub_a)
        s1 = Span(sub_b, identity(dot))
        comp, _ = span_compose(s2, s1, GRAPH)
        assert comp.apex == EMPTY_GRAPH


class TestEnumerate:
    def test_unit_rule_single_match(self):
        r2 = delete_vertex_rule()
        for tag in (SemanticsTag(DPO, GENERIC), SemanticsTag(SQPO, GENERIC)):
            matches = enumerate_rule_matches(r2, unit_rule(), tag, GRAPH)
            assert len(matches) == 1

    def test_sgraph_generic_dpo_refused(self):
        with pytest.raises(UnsupportedSemanticsError) as err:
            enumerate_rule_matches(clone_rule(), clone_rule(),
                                   SemanticsTag(DPO, GENERIC), SGRAPH)
        assert err.value.axiom == "(L-iii)"

    def test_clone_then_delete_nonempty(self):
        tag = SemanticsTag(SQPO, GENERIC)
        matches = enumerate_rule_matches(delete_vertex_rule(), clone_rule(),
                                         tag, GRAPH)
        assert matches
        for mu in matches:
            assert isinstance(mu, SqpoRuleMatch)


class TestCompose:
    def test_unit_law(self):
        for tag in (SemanticsTag(DPO, GENERIC), SemanticsTag(SQPO, GENERIC)):
            for r2 in (delete_vertex_rule(), clone_rule(), contraction_rule()):
                (mu,) = enumerate_rule_matches(r2, unit_rule(), tag, GRAPH)
                wit = compose_rules(r2, mu, unit_rule(), tag, GRAPH)
                assert rules_isomorphic(wit.composite, r2)

    def test_unit_law_left(self):
        tag = SemanticsTag(SQPO, GENERIC)
        r1 = delete_vertex_rule()
        (mu,) = enumerate_rule_matches(unit_rule(), r1, tag, GRAPH)
        wit = compose_rules(unit_rule(), mu, r1, tag, GRAPH)
        assert rules_isomorphic(wit.composite, r1)

    def test_dpo_linear_pair_matches_classical(self, e2):
        # classical concurrent composite of linear rules: pushout over the
        # overlap with pushout complements; compare on a delete-edge pair
        k = FinGraph(["p", "q"], {})
        i = FinGraph(["p", "q"], {"d": ("p", "q")})
        del_edge = Rule(GraphMorphism(k, k, {"p": "p", "q": "q"}, {}),
                        GraphMorphism(k, i, {"p": "p", "q": "q"}, {}))
        tag = SemanticsTag(DPO, LINEAR)
        matches = enumerate_rule_matches(del_edge, del_edge, tag, GRAPH)
        assert matches
        for mu in matches:
            wit = compose_rules(del_edge, mu, del_edge, tag, GRAPH)
            # composite deletes up to two edges depending on overlap
            assert len(wit.composite.input.edges) in (1, 2)

    def test_sqpo_clone_composites_differ_by_fpa(self, l1):
        # cloning then deleting: nontrivial back-propagation branches yield
        # non-isomorphic composites
        tag = SemanticsTag(SQPO, GENERIC)
        r1 = clone_rule()
        r2 = delete_vertex_rule()
        matches = enumerate_rule_matches(r2, r1, tag, GRAPH)
        keys = {compose_rules(r2, mu, r1, tag, GRAPH).composite.canonical_key()
                for mu in matches}
        assert len(keys) > 1

    def test_witness_verifies(self):
        tag = SemanticsTag(SQPO, GENERIC)
        r1 = clone_rule()
        r2 = delete_vertex_rule()
        for mu in enumerate_rule_matches(r2, r1, tag, GRAPH):
            wit = compose_rules(r2, mu, r1, tag, GRAPH)
            wit.verify(GRAPH)
