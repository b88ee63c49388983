"""Multi-sums, multi-initial pushout complements, and FPC pushout augmentations.

These three families carry the nondeterminism of non-linear rewriting: a
multi-sum lists the essentially distinct overlaps of two graphs, a multi-IPC
lists the essentially distinct pushout complements of a composable pair, and
an FPA lists the quotient augmentations of a pushout square by final pullback
complements.  Every family is returned complete, deduplicated up to the
respective commuting-isomorphism equivalence, and deterministically ordered.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from catrew.core import (
    CategoryCtx, ClassError, FinGraph, GraphMorphism, MediatingError,
    NonCommutingError, compose, diagram_canonical, fresh_id, identity,
    merged_id, morphisms_with_equations, set_partitions,
)
from catrew.universal import (
    COMMUTES, FPC, PULLBACK, PUSHOUT, Cospan, Span, Square, classify_square,
    classify_partial_map, coproduct, em_factorize, fpc, is_bijective,
    is_pushout_square, mediating_into_pullback, mediating_out_of_pushout,
    pullback, pushout, _fpc_base_square,
)


@dataclass(frozen=True)
class MultiSumElement:
    """One overlap pattern: a cospan of M-morphisms through which cospans factor."""

    in_left: GraphMorphism
    in_right: GraphMorphism
    witness_span: Span
    extension: GraphMorphism

    @property
    def target(self) -> FinGraph:
        return self.in_left.cod


@dataclass(frozen=True)
class MipcElement:
    """One pushout complement: A >-alpha-> A' -f_prime-> B' completing (f, beta)."""

    alpha: GraphMorphism
    f_prime: GraphMorphism
    po_square: Square


@dataclass(frozen=True)
class FpaElement:
    """One augmentation of a pushout square by a final pullback complement."""

    gamma: GraphMorphism
    g: GraphMorphism
    e: GraphMorphism
    fpc_square: Square


def _cospan_key(a: FinGraph, b: FinGraph, elem_left: GraphMorphism,
                elem_right: GraphMorphism) -> bytes:
    return diagram_canonical(
        [a, b, elem_left.cod],
        [(0, 2, elem_left), (1, 2, elem_right)],
        fixed=2)


# ---------------------------------------------------------------------------
# multi-sums
# ---------------------------------------------------------------------------

def multi_sum(a: FinGraph, b: FinGraph, ctx: CategoryCtx,
              cap: Optional[int] = None) -> list[MultiSumElement]:
    """All overlap cospans: pushouts of M-spans extended by monic epis.

    In the multigraph category the extensions are isomorphisms, so the family
    is exactly the pushouts of monic spans.  In the simple-graph category an
    extension may add edges whose endpoints do not both lie in one image.
    """
    from catrew.core import ResourceLimitError, enumerate_morphisms, m_subobjects

    ctx.validate_graph(a)
    ctx.validate_graph(b)
    found: dict[bytes, MultiSumElement] = {}
    for x_a in m_subobjects(a, ctx):
        overlap = x_a.dom
        for x_b in enumerate_morphisms(overlap, b, ctx, filter="regular_mono"):
            span = Span(x_a, x_b)
            cos, _ = pushout(span, ctx)
            p_a, p_b = cos.left, cos.right
            p = p_a.cod
            for ext in _extensions(p, p_a, p_b, ctx):
                in_left = compose(ext, p_a)
                in_right = compose(ext, p_b)
                if not (ctx.is_m(in_left) and ctx.is_m(in_right)):
                    continue
                key = _cospan_key(a, b, in_left, in_right)
                if key not in found:
                    found[key] = MultiSumElement(in_left, in_right, span, ext)
                    if cap is not None and len(found) > cap:
                        raise ResourceLimitError(
                            f"multi-sum family exceeded the cap of {cap}")
    return [found[k] for k in sorted(found)]


def _extensions(p: FinGraph, p_a: GraphMorphism, p_b: GraphMorphism,
                ctx: CategoryCtx):
    """Monic-epi extensions of the pushout object keeping both legs in M."""
    yield identity(p)
    if not ctx.is_simple:
        return
    img_a = set(p_a.vmap.values())
    img_b = set(p_b.vmap.values())
    present = set(p.edges.values())
    slots = [(u, v) for u in sorted(p.vertices) for v in sorted(p.vertices)
             if (u, v) not in present
             and not (u in img_a and v in img_a)
             and not (u in img_b and v in img_b)]
    for r in range(1, len(slots) + 1):
        for extra in itertools.combinations(slots, r):
            edges = dict(p.edges)
            for u, v in extra:
                edges[fresh_id(f"+{u}>{v}", edges)] = (u, v)
            q = FinGraph(p.vertices, edges)
            yield GraphMorphism(p, q, {v: v for v in p.vertices},
                                {e: e for e in p.edges})


def multisum_element_of(c: Cospan, ctx: CategoryCtx) -> tuple[MultiSumElement, GraphMorphism]:
    """The multi-sum element a cospan of M-morphisms factors through.

    Built directly by factorizing the induced morphism out of the coproduct,
    so no family enumeration is needed.  Returns the element together with
    the mediating M-morphism into the cospan target.
    """
    if not (ctx.is_m(c.left) and ctx.is_m(c.right)):
        raise ClassError("multisum factorization needs a cospan of M-morphisms")
    empty = FinGraph([], {})
    cp, cp_square = pushout(Span(
        GraphMorphism(empty, c.left.dom, {}, {}),
        GraphMorphism(empty, c.right.dom, {}, {})), ctx)
    induced = mediating_out_of_pushout(cp_square, c)
    e_part, m_part = em_factorize(induced, ctx)
    in_left = compose(e_part, cp.left)
    in_right = compose(e_part, cp.right)
    span, _ = pullback(Cospan(in_left, in_right), ctx)
    cos, po_sq = pushout(span, ctx)
    ext = mediating_out_of_pushout(po_sq, Cospan(in_left, in_right))
    return MultiSumElement(in_left, in_right, span, ext), m_part


def multisum_factorize(c: Cospan, elements: list[MultiSumElement],
                       ctx: CategoryCtx) -> tuple[int, GraphMorphism]:
    """Locate the unique family element factoring the cospan of M-morphisms.

    Returns the element index and the mediating M-morphism from the element
    object into the cospan target.
    """
    elem, m_part = multisum_element_of(c, ctx)
    for idx, family_elem in enumerate(elements):
        isos = [phi for phi in morphisms_with_equations(
                    family_elem.target, elem.target,
                    pinned=[(family_elem.in_left, elem.in_left),
                            (family_elem.in_right, elem.in_right)],
                    injective=True)
                if is_bijective(phi)]
        if isos:
            return idx, compose(m_part, isos[0])
    raise MediatingError("cospan does not factor through the multi-sum family")


# ---------------------------------------------------------------------------
# multi-initial pushout complements
# ---------------------------------------------------------------------------

def multi_ipc(f: GraphMorphism, beta: GraphMorphism, ctx: CategoryCtx,
              cap: Optional[int] = None) -> list[MipcElement]:
    """All pushout complements of f: A -> B then beta: B >-> B', up to the
    commuting-isomorphism equivalence.

    The complement object is forced to be A plus a copy of the part of B'
    outside the image of beta; the only freedom is where the new edges attach
    among the preimages of their endpoints.  Simple graphs additionally allow
    several new edges over one B'-edge (they merge in the pushout) and forbid
    attachments that would break edge reflection of the inclusion of A.
    """
    if f.cod != beta.dom:
        raise NonCommutingError("multi_ipc needs composable morphisms f then beta")
    if not ctx.is_m(beta):
        raise ClassError("multi_ipc requires beta in the M class")
    a, bprime = f.dom, beta.cod
    beta_v = set(beta.vmap.values())
    beta_e = set(beta.emap.values())
    bf = {v: beta.vmap[f.vmap[v]] for v in a.vertices}

    taken_v = set(a.vertices)
    r_vert = {}
    for x in sorted(bprime.vertices - beta_v):
        r_vert[x] = fresh_id(x, taken_v)
        taken_v.add(r_vert[x])

    def fiber(x: str) -> list[str]:
        hits = sorted(v for v in a.vertices if bf[v] == x)
        if x in r_vert:
            hits.append(r_vert[x])
        return hits

    placements: dict[str, list[tuple[str, str]]] = {}
    required: list[str] = []
    for eid in sorted(bprime.edges):
        s, t = bprime.edges[eid]
        opts = [(u, v) for u in fiber(s) for v in fiber(t)]
        if ctx.is_simple:
            opts = [(u, v) for (u, v) in opts
                    if u in r_vert.values() or v in r_vert.values()]
        if eid not in beta_e:
            required.append(eid)
            if not opts:
                return []
            placements[eid] = opts
        elif ctx.is_simple and opts:
            placements[eid] = opts

    from catrew.core import ResourceLimitError

    choice_sets: list[list[tuple[str, tuple[str, str]]]] = []
    if ctx.is_simple:
        pool = [(eid, uv) for eid in sorted(placements) for uv in placements[eid]]
        if cap is not None and len(pool) > 24:
            raise ResourceLimitError("complement placement pool too large")
        for r in range(len(pool) + 1):
            for combo in itertools.combinations(pool, r):
                covered = {eid for eid, _ in combo}
                if any(eid not in covered for eid in required):
                    continue
                pairs = [uv for _, uv in combo]
                if len(set(pairs)) != len(pairs):
                    continue
                choice_sets.append(list(combo))
                if cap is not None and len(choice_sets) > cap:
                    raise ResourceLimitError(
                        f"complement enumeration exceeded the cap of {cap}")
    else:
        per_edge = [[(eid, uv) for uv in placements[eid]] for eid in required]
        for combo in itertools.product(*per_edge):
            choice_sets.append(list(combo))
            if cap is not None and len(choice_sets) > cap:
                raise ResourceLimitError(
                    f"complement enumeration exceeded the cap of {cap}")

    out = []
    for combo in choice_sets:
        edges = dict(a.edges)
        emap_extra = {}
        for eid, (u, v) in combo:
            name = fresh_id(f"{eid}|{u}>{v}" if ctx.is_simple else eid, edges)
            edges[name] = (u, v)
            emap_extra[name] = eid
        c = FinGraph(set(a.vertices) | set(r_vert.values()), edges)
        alpha = GraphMorphism(a, c, {v: v for v in a.vertices},
                              {e: e for e in a.edges})
        vmap = dict(bf)
        vmap.update({r: x for x, r in r_vert.items()})
        emap = {e: beta.emap[f.emap[e]] for e in a.edges}
        emap.update(emap_extra)
        f_prime = GraphMorphism(c, bprime, vmap, emap)
        sq = Square(f, alpha, beta, f_prime, frozenset({COMMUTES, PUSHOUT}))
        if not is_pushout_square(sq, ctx):
            continue
        out.append(MipcElement(alpha, f_prime, sq))
    out.sort(key=lambda el: tuple(sorted(el.po_square.bottom.emap.items())))
    return out


def mipc_equivalent(e1: MipcElement, e2: MipcElement) -> bool:
    """Commuting isomorphism between two pushout complements."""
    if e1.alpha.dom != e2.alpha.dom or e1.f_prime.cod != e2.f_prime.cod:
        return False
    for phi in morphisms_with_equations(
            e1.alpha.cod, e2.alpha.cod,
            pinned=[(e1.alpha, e2.alpha)],
            post=[(e2.f_prime, e1.f_prime)],
            injective=True):
        if is_bijective(phi):
            return True
    return False


# ---------------------------------------------------------------------------
# FPC pushout augmentations
# ---------------------------------------------------------------------------

def _quotients(g: FinGraph, protected: set[str], protected_edges: set[str],
               ctx: CategoryCtx):
    """Epi quotients of g, up to codomain isomorphism, that stay injective on
    the protected vertices and edges.

    Yields morphisms g ->> E.  Multigraph quotients are compatible vertex and
    edge partitions; simple-graph quotients are vertex partitions followed by
    an arbitrary set of extra edges on the codomain.
    """
    for vpart in set_partitions(sorted(g.vertices)):
        classes = {v: merged_id(block) for block in vpart for v in block}
        if len({classes[v] for v in protected}) != len(protected):
            continue
        vname = classes
        groups: dict[tuple[str, str], list[str]] = {}
        for e in sorted(g.edges):
            s, t = g.edges[e]
            groups.setdefault((vname[s], vname[t]), []).append(e)
        if ctx.is_simple:
            base_edges = {merged_id(members): key for key, members in groups.items()}
            emap = {}
            for key, members in groups.items():
                for m in members:
                    emap[m] = merged_id(members)
            present = set(base_edges.values())
            verts = set(vname.values())
            marked = {vname[v] for v in protected}
            # extra edges between protected classes can never be reflected
            slots = sorted((u, v) for u in verts for v in verts
                           if (u, v) not in present
                           and not (u in marked and v in marked))
            for r in range(len(slots) + 1):
                for extra in itertools.combinations(slots, r):
                    all_edges = dict(base_edges)
                    for u, v in extra:
                        all_edges[fresh_id(f"+{u}>{v}", all_edges)] = (u, v)
                    cod = FinGraph(verts, all_edges)
                    yield GraphMorphism(g, cod, vname, emap)
        else:
            per_group = []
            for key in sorted(groups):
                members = groups[key]
                per_group.append(list(_constrained_partitions(members, protected_edges)))
            for combo in itertools.product(*per_group):
                emap = {}
                edges = {}
                for key, blocks in zip(sorted(groups), combo):
                    for block in blocks:
                        name = merged_id(block)
                        edges[name] = key
                        for m in block:
                            emap[m] = name
                cod = FinGraph(set(vname.values()), edges)
                yield GraphMorphism(g, cod, vname, emap)


def _constrained_partitions(members: list[str], protected: set[str]):
    for part in set_partitions(members):
        ok = all(sum(1 for m in block if m in protected) <= 1 for block in part)
        if ok:
            yield part


def fpa(po: Square, ctx: CategoryCtx,
        cap: Optional[int] = None) -> list[FpaElement]:
    """All FPC pushout augmentations of a pushout square along an M-morphism.

    The square's span is (left: A >-> A', top f: A -> B) and its cospan is
    (bottom f': A' -> B', right beta: B >-> B').  Every quotient e of B' with
    e . beta in M induces an FPC of (f, e . beta); the element is kept when
    the comparison morphism out of A' lands in M.
    """
    if not is_pushout_square(po, ctx):
        raise ClassError("fpa requires a pushout square")
    f, alpha, beta, f_prime = po.top, po.left, po.right, po.bottom
    if not (ctx.is_m(beta) and ctx.is_m(alpha)):
        raise ClassError("fpa requires the vertical legs in the M class")
    from catrew.core import ResourceLimitError

    bprime = beta.cod
    out = []
    seen = set()
    candidates = 0
    for e in _quotients(bprime, set(beta.vmap.values()),
                        set(beta.emap.values()), ctx):
        candidates += 1
        if cap is not None and candidates > cap:
            raise ResourceLimitError(
                f"fpa quotient enumeration exceeded the cap of {cap}")
        m_comp = compose(e, beta)
        if not ctx.is_m(m_comp):
            continue
        n, g, fpc_sq = fpc(f, m_comp, ctx)
        phi, _ = classify_partial_map(alpha, identity(alpha.dom), ctx)
        _, base_sq = _fpc_base_square(fpc_sq, ctx)
        try:
            gamma = mediating_into_pullback(base_sq, Span(phi, compose(e, f_prime)))
        except (MediatingError, NonCommutingError):
            continue
        if compose(gamma, alpha) != n:
            continue
        if not ctx.is_m(gamma):
            continue
        key = (tuple(sorted(e.vmap.items())), tuple(sorted(e.emap.items())),
               tuple(sorted(e.cod.edges.items())))
        if key in seen:
            continue
        seen.add(key)
        out.append(FpaElement(gamma, g, e, fpc_sq))
    out.sort(key=lambda el: (tuple(sorted(el.e.vmap.items())),
                             tuple(sorted(el.e.cod.edges.items())),
                             tuple(sorted(el.e.emap.items()))))
    return out


# ---------------------------------------------------------------------------
# FPC factorization into auto-augmented and inert parts
# ---------------------------------------------------------------------------

def fpc_factorize(sq: Square, ctx: CategoryCtx) -> tuple[Square, Square]:
    """Split an FPC square vertically into auto-augmented and inert factors.

    The top factor's pushout comparison is in E; the bottom factor's source
    vertical morphism is an isomorphism.  Vertical pasting returns the input.
    """
    kinds = classify_square(sq, ctx)
    if FPC not in kinds:
        raise ClassError("fpc_factorize requires an FPC square")
    if not (ctx.is_m(sq.left) and ctx.is_m(sq.right)):
        raise ClassError("fpc_factorize requires vertical legs in the M class")
    cos, po_sq = pushout(Span(sq.left, sq.top), ctx)
    p = mediating_out_of_pushout(po_sq, Cospan(sq.bottom, sq.right))
    e_part, m_part = em_factorize(p, ctx)
    upper = Square(sq.top, sq.left,
                   compose(e_part, cos.right), compose(e_part, cos.left))
    lower = Square(upper.bottom, identity(upper.bottom.dom), m_part, sq.bottom)
    return (upper.with_kinds(classify_square(upper, ctx)),
            lower.with_kinds(classify_square(lower, ctx)))
