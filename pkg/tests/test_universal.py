from __future__ import annotations

import random

import pytest

from catrew.core import (
    EMPTY_GRAPH, GRAPH, SGRAPH, FinGraph, GraphMorphism, MediatingError,
    classify, compose, enumerate_morphisms, find_isomorphism, identity,
    m_subobjects, MONO, REGULAR_MONO, EPI,
)
from catrew.universal import (
    COMMUTES, FPC, PULLBACK, PUSHOUT, Classifier, Cospan, Span, Square,
    classify_partial_map, classify_square, coproduct, em_factorize, fpc,
    is_bijective, mediating_into_pullback, mediating_out_of_pushout,
    partial_map_classifier, pullback, pushout,
)
from tests.test_core import mk_random_graph, random_morphism


def embed(sub_vs, sub_es, g: FinGraph) -> GraphMorphism:
    sub = FinGraph(sub_vs, {e: g.edges[e] for e in sub_es})
    return GraphMorphism(sub, g, {v: v for v in sub_vs}, {e: e for e in sub_es})


class TestPullback:
    def test_of_identities(self, e2):
        span, sq = pullback(Cospan(identity(e2), identity(e2)), GRAPH)
        assert find_isomorphism(span.apex, e2) is not None
        assert PULLBACK in classify_square(sq, GRAPH)

    def test_disjoint_points(self, dot, e2):
        fa = GraphMorphism(dot, e2, {"v": "a"}, {})
        fb = GraphMorphism(dot, e2, {"v": "b"}, {})
        span, _ = pullback(Cospan(fa, fb), GRAPH)
        assert span.apex == EMPTY_GRAPH

    def test_intersection_of_subgraphs(self):
        host = FinGraph(["a", "b", "c"], {"e1": ("a", "b"), "e2": ("b", "c")})
        m1 = embed(["a", "b"], ["e1"], host)
        m2 = embed(["b", "c"], ["e2"], host)
        span, _ = pullback(Cospan(m1, m2), GRAPH)
        # intersection is the single vertex b
        assert len(span.apex.vertices) == 1 and not span.apex.edges

    def test_mediating_unique_by_enumeration(self):
        rng = random.Random(2)
        for _ in range(15):
            g = mk_random_graph(rng, 3, 2)
            f1 = random_morphism(rng, g)
            g2 = mk_random_graph(rng, 3, 2)
            # build a cospan into a common object by pushing both into coproduct
            cp = coproduct(f1.cod, g2, GRAPH)
            c = Cospan(compose(cp.left, f1), cp.right)
            span, sq = pullback(c, GRAPH)
            u = mediating_into_pullback(sq, Span(span.left, span.right))
            assert u.is_identity()


class TestPushout:
    def test_coproduct_counts(self, e2, l1):
        cp = coproduct(e2, l1, GRAPH)
        obj = cp.target
        assert len(obj.vertices) == 3 and len(obj.edges) == 2

    def test_simple_graph_merges_parallel(self):
        # clone context: x1 -> y <- x2 merged back to a single x
        ctx3 = FinGraph(["x1", "x2", "y"], {"d1": ("x1", "y"), "d2": ("x2", "y")})
        k = FinGraph(["p", "q"], {})
        left = GraphMorphism(k, ctx3, {"p": "x1", "q": "x2"}, {})
        dotg = FinGraph(["x"], {})
        right = GraphMorphism(k, dotg, {"p": "x", "q": "x"}, {})
        cos, _ = pushout(Span(left, right), SGRAPH)
        assert len(cos.target.vertices) == 2 and len(cos.target.edges) == 1
        cos_m, _ = pushout(Span(left, right), GRAPH)
        assert len(cos_m.target.vertices) == 2 and len(cos_m.target.edges) == 2

    def test_mediating_identity(self, e2):
        span = Span(identity(e2), identity(e2))
        cos, sq = pushout(span, GRAPH)
        u = mediating_out_of_pushout(sq, cos)
        assert u.is_identity()

    def test_mediating_collapse(self, dot):
        to_dot = GraphMorphism(EMPTY_GRAPH, dot, {}, {})
        _, sq = pushout(Span(to_dot, to_dot), GRAPH)
        u = mediating_out_of_pushout(sq, Cospan(identity(dot), identity(dot)))
        assert set(u.vmap.values()) == {"v"}

    def test_mediating_rejects_inconsistent_cocone(self, dot, e2):
        k = FinGraph(["p"], {})
        leg = GraphMorphism(k, dot, {"p": "v"}, {})
        _, sq = pushout(Span(leg, leg), GRAPH)
        fa = GraphMorphism(dot, e2, {"v": "a"}, {})
        fb = GraphMorphism(dot, e2, {"v": "b"}, {})
        with pytest.raises((MediatingError, Exception)):
            mediating_out_of_pushout(sq, Cospan(fa, fb))


class TestFactorization:
    def test_iso_factor(self, e2):
        e_part, m_part = em_factorize(identity(e2), GRAPH)
        assert is_bijective(e_part) and is_bijective(m_part)

    def test_multigraph_image(self, e2):
        two = FinGraph(["x", "y"], {})
        f = GraphMorphism(two, e2, {"x": "a", "y": "b"}, {})
        e_part, m_part = em_factorize(f, GRAPH)
        assert not e_part.cod.edges
        assert MONO in classify(m_part, GRAPH)
        assert EPI in classify(e_part, GRAPH)

    def test_sgraph_image_gains_edges(self, e2):
        two = FinGraph(["x", "y"], {})
        f = GraphMorphism(two, e2, {"x": "a", "y": "b"}, {})
        e_part, m_part = em_factorize(f, SGRAPH)
        assert len(e_part.cod.edges) == 1
        assert REGULAR_MONO in classify(m_part, SGRAPH)
        assert EPI in classify(e_part, SGRAPH)

    def test_random_roundtrip(self):
        rng = random.Random(9)
        for ctx in (GRAPH, SGRAPH):
            for _ in range(25):
                g = mk_random_graph(rng, 4, 3)
                f = random_morphism(rng, g)
                if ctx.is_simple:
                    if not g.is_simple() or not f.cod.is_simple():
                        continue
                e_part, m_part = em_factorize(f, ctx)
                assert compose(m_part, e_part) == f
                assert ctx.is_e(e_part) and ctx.is_m(m_part)


class TestClassifier:
    def test_multigraph_sizes(self, l1):
        cl = partial_map_classifier(l1, GRAPH)
        assert len(cl.total.vertices) == 2
        assert len(cl.total.edges) == 1 + 4

    def test_sgraph_sizes(self, dot):
        cl = partial_map_classifier(dot, SGRAPH)
        assert len(cl.total.vertices) == 2
        assert len(cl.total.edges) == 0 + 2 * 1 + 1

    def test_empty(self):
        cl = partial_map_classifier(EMPTY_GRAPH, GRAPH)
        assert len(cl.total.vertices) == 1 and len(cl.total.edges) == 1

    def test_unit_is_m(self):
        rng = random.Random(1)
        for ctx in (GRAPH, SGRAPH):
            for _ in range(10):
                g = mk_random_graph(rng, 3, 3)
                if ctx.is_simple and not g.is_simple():
                    continue
                cl = partial_map_classifier(g, ctx)
                assert ctx.is_m(cl.unit)

    def test_unit_cartesian(self):
        # (eta_X, f) is a pullback of (T(f), eta_Y)
        from catrew.universal import classifier_map
        rng = random.Random(4)
        for ctx in (GRAPH, SGRAPH):
            checked = 0
            while checked < 10:
                g = mk_random_graph(rng, 3, 2)
                f = random_morphism(rng, g)
                if ctx.is_simple and (not g.is_simple() or not f.cod.is_simple()):
                    continue
                cl_x = partial_map_classifier(g, ctx)
                cl_y = partial_map_classifier(f.cod, ctx)
                tf = classifier_map(f, ctx, cl_x, cl_y)
                sq = Square(f, cl_x.unit, cl_y.unit, tf)
                assert PULLBACK in classify_square(sq, ctx)
                checked += 1

    def test_classified_map_pullback_condition(self, dot, e2):
        m = GraphMorphism(dot, e2, {"v": "a"}, {})
        f = identity(dot)
        phi, cl = classify_partial_map(m, f, GRAPH)
        sq = Square(f, m, cl.unit, phi)
        assert PULLBACK in classify_square(sq, GRAPH)
        # a maps to the image vertex, b to star, the edge to a star edge
        assert phi.vmap["b"] == cl.star


class TestFpc:
    def test_multigraph_clone(self, dot, l1):
        k = FinGraph(["k1", "k2"], {})
        f = GraphMorphism(k, dot, {"k1": "v", "k2": "v"}, {})
        m = GraphMorphism(dot, l1, {"v": "u"}, {})
        n, g, sq = fpc(f, m, GRAPH)
        assert len(sq.left.cod.vertices) == 2
        assert len(sq.left.cod.edges) == 4
        assert classify_square(sq, GRAPH) >= {PULLBACK, FPC}
        assert PUSHOUT not in classify_square(sq, GRAPH)

    def test_identity_m(self, e2):
        # FPC of (f, id) is (id, f) up to iso
        f = GraphMorphism(FinGraph(["x"], {}), e2, {"x": "a"}, {})
        n, g, sq = fpc(f, identity(e2), GRAPH)
        assert is_bijective(n)
        assert compose(g, n) == f

    def test_vertex_deletion_side_effect(self, e2):
        f = GraphMorphism(EMPTY_GRAPH, FinGraph(["i"], {}), {}, {})
        m = GraphMorphism(f.cod, e2, {"i": "a"}, {})
        n, g, sq = fpc(f, m, GRAPH)
        # deleting a removes the incident edge: complement is the lone vertex b
        assert len(sq.left.cod.vertices) == 1 and not sq.left.cod.edges

    def test_sgraph_clone_loop_free_is_pushout(self, e2):
        k = FinGraph(["k1", "k2"], {})
        dotg = FinGraph(["i"], {})
        f = GraphMorphism(k, dotg, {"k1": "i", "k2": "i"}, {})
        m = GraphMorphism(dotg, e2, {"i": "a"}, {})
        n, g, sq = fpc(f, m, SGRAPH)
        kinds = classify_square(sq, SGRAPH)
        assert {PULLBACK, FPC, PUSHOUT} <= kinds

    def test_mono_pair_gives_mono(self):
        rng = random.Random(6)
        checked = 0
        while checked < 20:
            c = mk_random_graph(rng, 4, 3)
            subs = m_subobjects(c, GRAPH)
            m = rng.choice(subs)
            subs2 = m_subobjects(m.dom, GRAPH)
            f = rng.choice(subs2)
            n, g, sq = fpc(f, m, GRAPH)
            assert MONO in classify(g, GRAPH)
            assert MONO in classify(n, GRAPH)
            checked += 1


class TestClassifySquare:
    def test_identity_square_all_kinds(self, e2):
        sq = Square(identity(e2), identity(e2), identity(e2), identity(e2))
        assert classify_square(sq, GRAPH) == {COMMUTES, PULLBACK, PUSHOUT, FPC}

    def test_pushouts_along_m_are_pullbacks(self):
        rng = random.Random(8)
        for ctx in (GRAPH, SGRAPH):
            checked = 0
            while checked < 15:
                g = mk_random_graph(rng, 3, 2)
                if ctx.is_simple and not g.is_simple():
                    continue
                m = rng.choice(m_subobjects(g, ctx))
                f = random_morphism(rng, m.dom)
                if ctx.is_simple and not f.cod.is_simple():
                    continue
                _, sq = pushout(Span(f, m), ctx)
                kinds = classify_square(sq, ctx)
                assert PUSHOUT in kinds and PULLBACK in kinds
                # the leg opposite the M-leg stays in M
                assert ctx.is_m(sq.bottom)
                checked += 1
