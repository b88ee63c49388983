from __future__ import annotations

import pytest

from catrew.core import (
    EMPTY_GRAPH, GRAPH, SGRAPH, ClassError, FinGraph, GraphMorphism,
    find_isomorphism, identity,
)
from catrew.rewriting import (
    DPO, GENERIC, INPUT_LINEAR, LINEAR, SQPO, Match, Rule, SemanticsTag,
    UnsupportedSemanticsError, apply, apply_all, enumerate_matches, hcompose,
    identity_rule, is_reversible, require_supported, supported,
)


def clone_rule() -> Rule:
    """Pure vertex cloning: two loose context vertices collapsing to one."""
    k = FinGraph(["k1", "k2"], {})
    dotg = FinGraph(["i"], {})
    return Rule(identity(k), GraphMorphism(k, dotg, {"k1": "i", "k2": "i"}, {}))


def contraction_rule() -> Rule:
    """Edge contraction: delete one edge, merge its endpoints."""
    k = FinGraph(["p", "q"], {})
    i = FinGraph(["p", "q"], {"d": ("p", "q")})
    o = FinGraph(["m"], {})
    return Rule(GraphMorphism(k, o, {"p": "m", "q": "m"}, {}),
                GraphMorphism(k, i, {"p": "p", "q": "q"}, {}))


class TestSupport:
    def test_table_refusals(self):
        tag = SemanticsTag(DPO, GENERIC)
        assert supported(SGRAPH, tag) == "(L-iii)"
        assert supported(SGRAPH, tag, "apply") is None
        assert supported(GRAPH, tag) is None
        with pytest.raises(UnsupportedSemanticsError) as err:
            require_supported(SGRAPH, tag)
        assert err.value.axiom == "(L-iii)"
        require_supported(SGRAPH, tag, force=True)

    def test_all_sqpo_supported_on_sgraph(self):
        for rc in (GENERIC, LINEAR, INPUT_LINEAR):
            assert supported(SGRAPH, SemanticsTag(SQPO, rc)) is None

    def test_rule_class_checked(self, l1):
        r = clone_rule()
        with pytest.raises(ClassError):
            enumerate_matches(r, l1, SemanticsTag(SQPO, LINEAR), GRAPH)


class TestMatches:
    def test_sqpo_matches_are_monos(self, l1):
        r = clone_rule()
        ms = enumerate_matches(r, l1, SemanticsTag(SQPO, GENERIC), GRAPH)
        assert len(ms) == 1

    def test_dpo_clone_match_count(self, l1):
        r = clone_rule()
        ms = enumerate_matches(r, l1, SemanticsTag(DPO, GENERIC), GRAPH)
        assert len(ms) == 4

    def test_antiparallel_contraction_unmatched_in_sgraph(self):
        # the input leg is not edge-reflecting, so in the simple-graph
        # category the rule is generic; matches must still be regular monos
        host = FinGraph(["a", "b"], {"e1": ("a", "b"), "e2": ("b", "a")})
        r = contraction_rule()
        ms = enumerate_matches(r, host, SemanticsTag(SQPO, GENERIC), SGRAPH)
        assert ms == []

    def test_identity_match_exists(self, e2):
        r = contraction_rule()
        ms = enumerate_matches(r, r.input, SemanticsTag(SQPO, INPUT_LINEAR), GRAPH)
        assert any(m.morphism.is_identity() for m in ms)


class TestApply:
    def test_sqpo_clone_at_loop(self, l1):
        r = clone_rule()
        (d,) = apply_all(r, l1, SemanticsTag(SQPO, GENERIC), GRAPH)
        assert len(d.result.vertices) == 2
        assert len(d.result.edges) == 4
        assert not is_reversible(d, GRAPH)

    def test_sqpo_clone_loop_free_sgraph_reversible(self, e2):
        r = clone_rule()
        ds = apply_all(r, e2, SemanticsTag(SQPO, GENERIC), SGRAPH)
        assert len(ds) == 2
        for d in ds:
            assert is_reversible(d, SGRAPH)

    def test_dpo_contraction_parallel_edges(self):
        host = FinGraph(["a", "b"], {"e1": ("a", "b"), "e2": ("a", "b"),
                                     "e3": ("a", "b")})
        r = contraction_rule()
        ds = apply_all(r, host, SemanticsTag(DPO, GENERIC), GRAPH)
        assert ds
        for d in ds:
            assert len(d.result.vertices) == 1
            assert len(d.result.edges) == 2
            assert all(s == t for s, t in d.result.edges.values())
            assert is_reversible(d, GRAPH)

    def test_identity_rule_neutral(self, e2, l1):
        for host in (e2, l1):
            r = identity_rule(host)
            d = apply(r, Match(identity(host)), SemanticsTag(SQPO, GENERIC), GRAPH)
            assert find_isomorphism(d.result, host) is not None

    def test_vertex_deletion_side_effect(self):
        host = FinGraph(["a", "b", "c"], {"e1": ("a", "b"), "e2": ("c", "a")})
        dotg = FinGraph(["i"], {})
        r = Rule(GraphMorphism(EMPTY_GRAPH, EMPTY_GRAPH, {}, {}),
                 GraphMorphism(EMPTY_GRAPH, dotg, {}, {}))
        tag = SemanticsTag(SQPO, GENERIC)
        ds = apply_all(r, host, tag, GRAPH)
        deleted_a = [d for d in ds if d.match.morphism.vmap["i"] == "a"]
        assert len(deleted_a) == 1
        res = deleted_a[0].result
        assert len(res.vertices) == 2 and not res.edges

    def test_dpo_derivation_reversal(self, l1):
        # reversing the rule and applying at the comatch returns to the host
        r = clone_rule()
        tag = SemanticsTag(DPO, GENERIC)
        for m in enumerate_matches(r, l1, tag, GRAPH):
            d = apply(r, m, tag, GRAPH)
            rev = r.reversed()
            back_matches = enumerate_matches(rev, d.result, tag, GRAPH)
            hits = [b for b in back_matches
                    if b.morphism == d.comatch
                    and find_isomorphism(apply(rev, b, tag, GRAPH).result,
                                         l1) is not None]
            assert hits


class TestHcompose:
    def test_identity_then_rule(self, l1):
        tag = SemanticsTag(SQPO, GENERIC)
        r = clone_rule()
        (d,) = apply_all(r, l1, tag, GRAPH)
        lead = apply(identity_rule(r.input), Match(d.match.morphism), tag, GRAPH)
        # align interfaces: the identity derivation's comatch is its own match
        comp = hcompose(d, lead) if lead.comatch == d.match.morphism else None
        if comp is not None:
            assert find_isomorphism(comp.result, d.result) is not None

    def test_two_step_composite(self, l1):
        tag = SemanticsTag(SQPO, GENERIC)
        r1 = clone_rule()
        (d1,) = apply_all(r1, l1, tag, GRAPH)
        # second rule: delete one loose vertex, using derived comatch as match
        dotg = FinGraph(["i"], {})
        r2 = Rule(GraphMorphism(EMPTY_GRAPH, EMPTY_GRAPH, {}, {}),
                  GraphMorphism(EMPTY_GRAPH, dotg, {}, {}))
        # r2's input must equal r1's output for the shared-interface composite
        r2b = Rule(identity(r1.output), identity(r1.output))
        d2 = apply(r2b, Match(d1.comatch), tag, GRAPH)
        comp = hcompose(d2, d1, GRAPH)
        assert find_isomorphism(comp.result, d2.result) is not None
        assert comp.host == d1.host


def test_hcompose_real_pair(l1):
    tag = SemanticsTag(SQPO, GENERIC)
    r1 = clone_rule()
    (d1,) = apply_all(r1, l1, tag, GRAPH)
    r2 = identity_rule(r1.output)
    d2 = apply(r2, Match(d1.comatch), tag, GRAPH)
    comp = hcompose(d2, d1, GRAPH)
    assert find_isomorphism(comp.result, d1.result) is not None
