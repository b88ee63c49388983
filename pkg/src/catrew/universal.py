"""Pullbacks, pushouts, factorizations, partial-map classifiers, and FPCs.

Squares are oriented with horizontal top/bottom and vertical left/right
morphisms, commuting as ``bottom . left == right . top``.  The final pullback
complement of ``(top, right)`` (when the right leg is monic in the relevant
class) lives at ``(left, bottom)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from catrew.core import (
    CategoryCtx, ClassError, FinGraph, GraphMorphism, MediatingError,
    NonCommutingError, compose, fresh_id, identity, merged_id, pair_id, tagged,
)

COMMUTES = "commutes"
PULLBACK = "pullback"
PUSHOUT = "pushout"
FPC = "fpc"


@dataclass(frozen=True)
class Span:
    """Two morphisms out of a common apex: left: K -> A, right: K -> B."""

    left: GraphMorphism
    right: GraphMorphism

    def __post_init__(self):
        if self.left.dom != self.right.dom:
            raise NonCommutingError("span legs have different apexes")

    @property
    def apex(self) -> FinGraph:
        return self.left.dom


@dataclass(frozen=True)
class Cospan:
    """Two morphisms into a common object: left: A -> Z, right: B -> Z."""

    left: GraphMorphism
    right: GraphMorphism

    def __post_init__(self):
        if self.left.cod != self.right.cod:
            raise NonCommutingError("cospan legs have different targets")

    @property
    def target(self) -> FinGraph:
        return self.left.cod


@dataclass(frozen=True)
class Square:
    """A commuting square; ``kinds`` records witnessed classifications."""

    top: GraphMorphism
    left: GraphMorphism
    right: GraphMorphism
    bottom: GraphMorphism
    kinds: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.top.dom != self.left.dom:
            raise NonCommutingError("top and left legs start at different objects")
        if self.top.cod != self.right.dom:
            raise NonCommutingError("right leg does not start at the top codomain")
        if self.left.cod != self.bottom.dom:
            raise NonCommutingError("bottom leg does not start at the left codomain")
        if self.right.cod != self.bottom.cod:
            raise NonCommutingError("right and bottom legs end at different objects")
        if compose(self.bottom, self.left) != compose(self.right, self.top):
            raise NonCommutingError("square does not commute")

    def with_kinds(self, kinds) -> "Square":
        return Square(self.top, self.left, self.right, self.bottom, frozenset(kinds))

    def vpaste(self, lower: "Square") -> "Square":
        """Vertical composite: self on top of ``lower``."""
        return Square(self.top, compose(lower.left, self.left),
                      compose(lower.right, self.right), lower.bottom)

    def hpaste(self, right_sq: "Square") -> "Square":
        """Horizontal composite: self on the left of ``right_sq``."""
        return Square(compose(right_sq.top, self.top), self.left,
                      right_sq.right, compose(right_sq.bottom, self.bottom))


def is_bijective(f: GraphMorphism) -> bool:
    return (len(set(f.vmap.values())) == len(f.vmap)
            and set(f.vmap.values()) == f.cod.vertices
            and len(set(f.emap.values())) == len(f.emap)
            and set(f.emap.values()) == f.cod.edge_ids)


# ---------------------------------------------------------------------------
# pullbacks
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16384)
def pullback(c: Cospan, ctx: CategoryCtx) -> tuple[Span, Square]:
    """Componentwise pullback; the apex carries pair-encoded identifiers."""
    f, g = c.left, c.right
    verts = {}
    for a in sorted(f.dom.vertices):
        for b in sorted(g.dom.vertices):
            if f.vmap[a] == g.vmap[b]:
                verts[pair_id(a, b)] = (a, b)
    edges = {}
    for e1 in sorted(f.dom.edges):
        for e2 in sorted(g.dom.edges):
            if f.emap[e1] == g.emap[e2]:
                s = pair_id(f.dom.edges[e1][0], g.dom.edges[e2][0])
                t = pair_id(f.dom.edges[e1][1], g.dom.edges[e2][1])
                edges[pair_id(e1, e2)] = ((e1, e2), (s, t))
    apex = FinGraph(verts, {k: st for k, (_, st) in edges.items()})
    p1 = GraphMorphism(apex, f.dom, {k: a for k, (a, _) in verts.items()},
                       {k: pair[0] for k, (pair, _) in edges.items()})
    p2 = GraphMorphism(apex, g.dom, {k: b for k, (_, b) in verts.items()},
                       {k: pair[1] for k, (pair, _) in edges.items()})
    span = Span(p1, p2)
    square = Square(p2, p1, g, f, frozenset({COMMUTES, PULLBACK}))
    return span, square


def mediating_into_pullback(sq: Square, cone: Span) -> GraphMorphism:
    """The unique u with sq.left . u = cone.left and sq.top . u = cone.right.

    ``sq`` must be the canonical pullback square produced by :func:`pullback`
    (its apex ids are pair-encoded).
    """
    if compose(sq.bottom, cone.left) != compose(sq.right, cone.right):
        raise NonCommutingError("cone does not commute with the pullback cospan")
    apex = sq.top.dom
    vmap = {}
    for x in cone.apex.vertices:
        key = pair_id(cone.left.vmap[x], cone.right.vmap[x])
        if key not in apex.vertices:
            raise MediatingError("cone misses the pullback apex")
        vmap[x] = key
    emap = {}
    for e in cone.apex.edges:
        key = pair_id(cone.left.emap[e], cone.right.emap[e])
        if key not in apex.edges:
            raise MediatingError("cone misses the pullback apex")
        emap[e] = key
    return GraphMorphism(cone.apex, apex, vmap, emap)


# ---------------------------------------------------------------------------
# pushouts
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> dict[str, tuple[str, ...]]:
        groups: dict[str, list[str]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return {r: tuple(sorted(g)) for r, g in groups.items()}


def pushout(s: Span, ctx: CategoryCtx) -> tuple[Cospan, Square]:
    """Quotient of the disjoint union by the span-generated identifications.

    Quotient classes are named by their sorted member lists.  In the
    simple-graph category the multigraph pushout is followed by the
    parallel-edge collapse (image factorization of the incidence map).
    """
    f, g = s.left, s.right
    a_graph, b_graph = f.cod, g.cod
    vitems = [tagged(0, v) for v in a_graph.vertices] + \
             [tagged(1, v) for v in b_graph.vertices]
    eitems = [tagged(0, e) for e in a_graph.edges] + \
             [tagged(1, e) for e in b_graph.edges]
    uf_v = _UnionFind(vitems)
    uf_e = _UnionFind(eitems)
    for k in s.apex.vertices:
        uf_v.union(tagged(0, f.vmap[k]), tagged(1, g.vmap[k]))
    for k in s.apex.edges:
        uf_e.union(tagged(0, f.emap[k]), tagged(1, g.emap[k]))
    vcls = uf_v.classes()
    ecls = uf_e.classes()
    vname = {m: merged_id(members) for r, members in vcls.items() for m in members}
    vertices = set(vname.values())

    def vert_of(tag, v):
        return vname[tagged(tag, v)]

    edges = {}
    ename = {}
    for r, members in sorted(ecls.items()):
        name = merged_id(members)
        m0 = members[0]
        tag, eid = int(m0[0]), m0[2:]
        graph = a_graph if tag == 0 else b_graph
        sv, tv = graph.edges[eid]
        edges[name] = (vert_of(tag, sv), vert_of(tag, tv))
        for m in members:
            ename[m] = name
    obj = FinGraph(vertices, edges)
    q_a = GraphMorphism(a_graph, obj,
                        {v: vert_of(0, v) for v in a_graph.vertices},
                        {e: ename[tagged(0, e)] for e in a_graph.edges})
    q_b = GraphMorphism(b_graph, obj,
                        {v: vert_of(1, v) for v in b_graph.vertices},
                        {e: ename[tagged(1, e)] for e in b_graph.edges})
    if ctx.is_simple:
        refl, unit = ctx.reflect(obj)
        q_a = compose(unit, q_a)
        q_b = compose(unit, q_b)
        obj = refl
    cospan = Cospan(q_a, q_b)
    square = Square(g, f, q_b, q_a, frozenset({COMMUTES, PUSHOUT}))
    return cospan, square


def coproduct(a: FinGraph, b: FinGraph, ctx: CategoryCtx) -> Cospan:
    from catrew.core import EMPTY_GRAPH
    empty_to = lambda g: GraphMorphism(EMPTY_GRAPH, g, {}, {})
    cospan, _ = pushout(Span(empty_to(a), empty_to(b)), ctx)
    return cospan


def mediating_out_of_pushout(sq: Square, cocone: Cospan) -> GraphMorphism:
    """The unique u with u . sq.bottom = cocone.left and u . sq.right = cocone.right.

    ``sq`` must be a pushout square; the mediating map is read off by picking
    any member of each quotient class, and checked for well-definedness.
    """
    if compose(cocone.left, sq.left) != compose(cocone.right, sq.top):
        raise NonCommutingError("cocone does not commute with the pushout span")
    obj = sq.bottom.cod
    legs = (sq.bottom, sq.right)
    cones = (cocone.left, cocone.right)
    vmap: dict[str, str] = {}
    emap: dict[str, str] = {}
    for leg, cone in zip(legs, cones):
        for v, w in leg.vmap.items():
            img = cone.vmap[v]
            if vmap.setdefault(w, img) != img:
                raise MediatingError("cocone is not constant on a vertex class")
        for e, d in leg.emap.items():
            img = cone.emap[e]
            if emap.setdefault(d, img) != img:
                raise MediatingError("cocone is not constant on an edge class")
    if set(vmap) != obj.vertices or set(emap) != obj.edge_ids:
        raise MediatingError("pushout legs are not jointly surjective")
    return GraphMorphism(obj, cocone.target, vmap, emap)


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------

def em_factorize(f: GraphMorphism, ctx: CategoryCtx) -> tuple[GraphMorphism, GraphMorphism]:
    """Factor f as m . e with e in the E class and m in the M class.

    Multigraphs: plain image factorization.  Simple graphs: the middle object
    keeps every codomain edge between image vertices, so it may gain edges
    relative to the set-theoretic image; m is then edge-reflecting.
    """
    img_v = sorted(set(f.vmap.values()))
    if ctx.is_simple:
        img_e = sorted(e for e, (s, t) in f.cod.edges.items()
                       if s in set(img_v) and t in set(img_v))
    else:
        img_e = sorted(set(f.emap.values()))
    mid = FinGraph(img_v, {e: f.cod.edges[e] for e in img_e})
    e_part = GraphMorphism(f.dom, mid, dict(f.vmap), dict(f.emap))
    m_part = GraphMorphism(mid, f.cod, {v: v for v in img_v}, {e: e for e in img_e})
    return e_part, m_part


# ---------------------------------------------------------------------------
# partial-map classifiers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classifier:
    """The classifying object T(base) together with its unit base -> T(base)."""

    base: FinGraph
    total: FinGraph
    unit: GraphMorphism
    star: str
    star_edges: dict[tuple[str, str], str] = field(compare=False)


@lru_cache(maxsize=4096)
def partial_map_classifier(g: FinGraph, ctx: CategoryCtx) -> Classifier:
    """T adjoins a sink vertex and the edges classifying undefinedness.

    Multigraphs gain one edge per ordered pair over the extended vertex set;
    simple graphs gain only the star-incident pairs.
    """
    star = fresh_id("*", g.vertices)
    verts = set(g.vertices) | {star}
    edges = dict(g.edges)
    star_edges: dict[tuple[str, str], str] = {}
    if ctx.is_simple:
        new_pairs = [(v, star) for v in sorted(g.vertices)]
        new_pairs += [(star, v) for v in sorted(g.vertices)]
        new_pairs.append((star, star))
    else:
        ordered = sorted(verts)
        new_pairs = [(n, p) for n in ordered for p in ordered]
    for n, p in new_pairs:
        eid = fresh_id(f"*{n}>{p}", edges)
        edges[eid] = (n, p)
        star_edges[(n, p)] = eid
    total = FinGraph(verts, edges)
    unit = GraphMorphism(g, total, {v: v for v in g.vertices},
                         {e: e for e in g.edges})
    return Classifier(g, total, unit, star, star_edges)


@lru_cache(maxsize=8192)
def classify_partial_map(m: GraphMorphism, f: GraphMorphism,
                         ctx: CategoryCtx) -> tuple[GraphMorphism, Classifier]:
    """The unique phi: cod(m) -> T(cod(f)) pulling eta back to (m, f).

    Elements in the image of m follow f; everything else lands in the
    star component.
    """
    if not ctx.is_m(m):
        raise ClassError("classified leg must lie in the M class")
    if m.dom != f.dom:
        raise NonCommutingError("partial map legs must share their domain")
    cl = partial_map_classifier(f.cod, ctx)
    inv_v = {w: x for x, w in m.vmap.items()}
    inv_e = {d: x for x, d in m.emap.items()}
    a = m.cod
    vmap = {}
    for v in a.vertices:
        vmap[v] = f.vmap[inv_v[v]] if v in inv_v else cl.star
    emap = {}
    for e, (s, t) in a.edges.items():
        if e in inv_e:
            emap[e] = f.emap[inv_e[e]]
        else:
            key = (vmap[s], vmap[t])
            if key not in cl.star_edges:
                raise ClassError(
                    "unclassifiable edge outside the image; the mono is not "
                    "edge-reflecting")
            emap[e] = cl.star_edges[key]
    return GraphMorphism(a, cl.total, vmap, emap), cl


def classifier_map(f: GraphMorphism, ctx: CategoryCtx,
                   cl_dom: Optional[Classifier] = None,
                   cl_cod: Optional[Classifier] = None) -> GraphMorphism:
    """The functor action T(f): T(dom f) -> T(cod f)."""
    cl_dom = cl_dom or partial_map_classifier(f.dom, ctx)
    cl_cod = cl_cod or partial_map_classifier(f.cod, ctx)
    ext = dict(f.vmap)
    ext[cl_dom.star] = cl_cod.star
    vmap = {v: ext[v] for v in cl_dom.total.vertices}
    emap = {}
    for e, (s, t) in cl_dom.total.edges.items():
        if e in f.dom.edges:
            emap[e] = f.emap[e]
        else:
            emap[e] = cl_cod.star_edges[(ext[s], ext[t])]
    return GraphMorphism(cl_dom.total, cl_cod.total, vmap, emap)


# ---------------------------------------------------------------------------
# final pullback complements
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8192)
def fpc(f: GraphMorphism, m: GraphMorphism, ctx: CategoryCtx) -> tuple[GraphMorphism, GraphMorphism, Square]:
    """Final pullback complement of f: A -> B then m: B >-> C.

    Classifies m against the identity, pulls the classifier map T(f) back
    along it, and mediates A into the apex.  Returns (n: A >-> F, g: F -> C)
    and the witnessing square (top=f, left=n, right=m, bottom=g).
    """
    if f.cod != m.dom:
        raise NonCommutingError("fpc needs composable morphisms f then m")
    if not ctx.is_m(m):
        raise ClassError("fpc requires the second leg in the M class")
    m_bar, cl_b = classify_partial_map(m, identity(m.dom), ctx)
    cl_a = partial_map_classifier(f.dom, ctx)
    tf = classifier_map(f, ctx, cl_a, cl_b)
    span, sq = pullback(Cospan(tf, m_bar), ctx)
    n = mediating_into_pullback(sq, Span(cl_a.unit, compose(m, f)))
    g = span.right
    square = Square(f, n, m, g, frozenset({COMMUTES, PULLBACK, FPC}))
    return n, g, square


def fpc_mediating(square: Square, candidate: Square, ctx: CategoryCtx) -> GraphMorphism:
    """The comparison u out of a pullback square into the canonical FPC.

    ``square`` must be the canonical square built by :func:`fpc` for
    (candidate.top, candidate.right); u satisfies square.bottom . u =
    candidate.bottom and u . candidate.left = square.left.
    """
    phi, _ = classify_partial_map(candidate.left, identity(candidate.left.dom), ctx)
    # the canonical FPC object is a pullback apex over T(A) and C
    _, base_sq = _fpc_base_square(square, ctx)
    return mediating_into_pullback(base_sq, Span(phi, candidate.bottom))


def _fpc_base_square(square: Square, ctx: CategoryCtx) -> tuple[Span, Square]:
    m_bar, cl_b = classify_partial_map(square.right, identity(square.right.dom), ctx)
    cl_a = partial_map_classifier(square.top.dom, ctx)
    tf = classifier_map(square.top, ctx, cl_a, cl_b)
    return pullback(Cospan(tf, m_bar), ctx)


# ---------------------------------------------------------------------------
# square classification
# ---------------------------------------------------------------------------

def is_pushout_square(sq: Square, ctx: CategoryCtx) -> bool:
    """Cheap pushout test: the canonical comparison morphism is bijective."""
    _, canon = pushout(Span(sq.left, sq.top), ctx)
    try:
        return is_bijective(mediating_out_of_pushout(canon, Cospan(sq.bottom, sq.right)))
    except MediatingError:
        return False


def is_pullback_square(sq: Square, ctx: CategoryCtx) -> bool:
    _, canon = pullback(Cospan(sq.bottom, sq.right), ctx)
    return is_bijective(mediating_into_pullback(canon, Span(sq.left, sq.top)))

def classify_square(sq: Square, ctx: CategoryCtx) -> frozenset[str]:
    """Recompute the kinds this square witnesses against the canonical ones."""
    kinds = {COMMUTES}
    # pullback: mediating of (left, top) into the canonical pullback is an iso
    _, canon_pb = pullback(Cospan(sq.bottom, sq.right), ctx)
    u = mediating_into_pullback(canon_pb, Span(sq.left, sq.top))
    is_pb = is_bijective(u)
    if is_pb:
        kinds.add(PULLBACK)
    # pushout: mediating out of the canonical pushout is an iso
    _, canon_po = pushout(Span(sq.left, sq.top), ctx)
    try:
        w = mediating_out_of_pushout(canon_po, Cospan(sq.bottom, sq.right))
        if is_bijective(w):
            kinds.add(PUSHOUT)
    except MediatingError:
        pass
    # fpc: pullback whose comparison into the canonical fpc is an iso
    if is_pb and ctx.is_m(sq.right):
        _, _, canon = fpc(sq.top, sq.right, ctx)
        u2 = fpc_mediating(canon, sq, ctx)
        if (is_bijective(u2)
                and compose(canon.bottom, u2) == sq.bottom
                and compose(u2, sq.left) == canon.left):
            kinds.add(FPC)
    return frozenset(kinds)
