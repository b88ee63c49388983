"""Rule composition along admissible matches for both semantics.

A rule match packages one element from each nondeterministic family involved:
the overlap (multi-sum element), the complement choices (multi-IPC elements),
and, for SqPO, the augmentation (FPA element).  Composing along a match
builds the full numbered witness diagram and the composite rule by span
composition; every recorded square is re-verified against its declared kind.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from catrew.core import (
    CategoryCtx, CatrewError, FinGraph, GraphMorphism, ResourceLimitError,
    compose, diagram_canonical, identity,
)
from catrew.multi import (
    FpaElement, MipcElement, MultiSumElement, fpa, multi_ipc, multi_sum,
)
from catrew.rewriting import (
    DPO, SQPO, Rule, SemanticsTag, require_supported,
)
from catrew.universal import (
    COMMUTES, FPC, PULLBACK, PUSHOUT, Cospan, Span, Square, classify_square,
    fpc, mediating_into_pullback, pullback, pushout,
)


class VerificationError(CatrewError):
    """A constructed witness square failed to re-verify to its declared kind."""


@dataclass(frozen=True)
class DpoRuleMatch:
    multisum: MultiSumElement
    mipc2: MipcElement
    mipc1: MipcElement


@dataclass(frozen=True)
class SqpoRuleMatch:
    multisum: MultiSumElement
    mipc1: MipcElement
    fpa_elem: FpaElement


RuleMatch = Union[DpoRuleMatch, SqpoRuleMatch]


@dataclass(frozen=True)
class CompositionWitness:
    """The composite rule with its full numbered-square construction record."""

    composite: Rule
    tag: SemanticsTag
    squares: dict
    pullback_square: Square
    rule_match: RuleMatch = None

    def verify(self, ctx: CategoryCtx) -> None:
        for name, (sq, want) in sorted(self.squares.items()):
            kinds = classify_square(sq, ctx)
            if want not in kinds:
                raise VerificationError(
                    f"witness square {name} should be a {want} but classifies "
                    f"as {sorted(kinds)}")
        if PULLBACK not in classify_square(self.pullback_square, ctx):
            raise VerificationError("span-composition square is not a pullback")


def span_compose(s2: Span, s1: Span, ctx: CategoryCtx) -> tuple[Span, Square]:
    """Composite of two spans over a shared interface object, by pullback.

    ``s1`` is performed first; its left (output) leg must land in the same
    object as ``s2``'s right (input) leg.
    """
    if s2.right.cod != s1.left.cod:
        raise CatrewError("span interfaces do not share an object")
    pb_span, pb_sq = pullback(Cospan(s2.right, s1.left), ctx)
    composite = Span(compose(s2.left, pb_span.left),
                     compose(s1.right, pb_span.right))
    return composite, pb_sq


def rule_match_key(r2: Rule, r1: Rule, mu: RuleMatch) -> bytes:
    """Canonical key of a rule match up to compatible universal isomorphisms.

    The rule graphs keep their labels; all constructed objects may be
    relabelled by isos commuting with the recorded morphisms.
    """
    if isinstance(mu, DpoRuleMatch):
        graphs = [r2.input, r1.output, r2.context, r1.context,
                  mu.multisum.target, mu.mipc2.alpha.cod, mu.mipc1.alpha.cod]
        arrows = [
            (0, 4, mu.multisum.in_left), (1, 4, mu.multisum.in_right),
            (2, 5, mu.mipc2.alpha), (5, 4, mu.mipc2.f_prime),
            (3, 6, mu.mipc1.alpha), (6, 4, mu.mipc1.f_prime),
        ]
        return diagram_canonical(graphs, arrows, fixed=4)
    graphs = [r2.input, r1.output, r1.context, r1.input,
              mu.multisum.target, mu.mipc1.alpha.cod,
              mu.fpa_elem.e.dom, mu.fpa_elem.gamma.cod, mu.fpa_elem.e.cod]
    arrows = [
        (0, 4, mu.multisum.in_left), (1, 4, mu.multisum.in_right),
        (2, 5, mu.mipc1.alpha), (5, 4, mu.mipc1.f_prime),
        (5, 7, mu.fpa_elem.gamma), (6, 8, mu.fpa_elem.e),
        (7, 8, mu.fpa_elem.g),
    ]
    return diagram_canonical(graphs, arrows, fixed=4)


def enumerate_rule_matches(r2: Rule, r1: Rule, tag: SemanticsTag,
                           ctx: CategoryCtx, force: bool = False,
                           family_cap: Optional[int] = None) -> list[RuleMatch]:
    """All admissible rule matches, up to compatible universal isomorphisms.

    ``family_cap`` bounds each nondeterministic family and the match count;
    exceeding it raises ResourceLimitError rather than returning a partial
    enumeration.
    """
    require_supported(ctx, tag, "compose", force)
    for r in (r1, r2):
        if not r.satisfies(tag.rule_class, ctx):
            raise CatrewError(
                f"rule has linearity {r.linearity(ctx)!r}, outside the "
                f"requested class {tag.rule_class!r}")
    out: dict[bytes, RuleMatch] = {}

    def grow(mu):
        out.setdefault(rule_match_key(r2, r1, mu), mu)
        if family_cap is not None and len(out) > family_cap:
            raise ResourceLimitError(
                f"rule match enumeration exceeded the cap of {family_cap}")

    for ms in multi_sum(r2.input, r1.output, ctx, cap=family_cap):
        j2, j1 = ms.in_left, ms.in_right
        mipc1s = multi_ipc(r1.output_morphism, j1, ctx, cap=family_cap)
        if tag.base == DPO:
            mipc2s = multi_ipc(r2.input_morphism, j2, ctx, cap=family_cap)
            for e2 in mipc2s:
                for e1 in mipc1s:
                    grow(DpoRuleMatch(ms, e2, e1))
        else:
            for e1 in mipc1s:
                _, po_sq = pushout(Span(e1.alpha, r1.input_morphism), ctx)
                for aug in fpa(po_sq, ctx, cap=family_cap):
                    grow(SqpoRuleMatch(ms, e1, aug))
    return [out[k] for k in sorted(out)]


def compose_rules(r2: Rule, mu: RuleMatch, r1: Rule, tag: SemanticsTag,
                  ctx: CategoryCtx, force: bool = False,
                  verify: bool = True) -> CompositionWitness:
    require_supported(ctx, tag, "compose", force)
    if tag.base == DPO:
        witness = _compose_dpo(r2, mu, r1, tag, ctx)
    else:
        witness = _compose_sqpo(r2, mu, r1, tag, ctx)
    if verify:
        witness.verify(ctx)
    return witness


def _compose_dpo(r2: Rule, mu: DpoRuleMatch, r1: Rule, tag: SemanticsTag,
                 ctx: CategoryCtx) -> CompositionWitness:
    e2, e1 = mu.mipc2, mu.mipc1
    cos_2_2, sq_2_2 = pushout(Span(e2.alpha, r2.output_morphism), ctx)
    o_bar = cos_2_2.left         # Kbar2 -> O21
    cos_2_1, sq_2_1 = pushout(Span(e1.alpha, r1.input_morphism), ctx)
    i_bar = cos_2_1.left         # Kbar1 -> I21
    composite_span, pb_sq = span_compose(
        Span(o_bar, e2.f_prime), Span(e1.f_prime, i_bar), ctx)
    composite = Rule(composite_span.left, composite_span.right)
    squares = {
        "1_2": (e2.po_square, PUSHOUT),
        "1_1": (e1.po_square, PUSHOUT),
        "2_2": (sq_2_2, PUSHOUT),
        "2_1": (sq_2_1, PUSHOUT),
    }
    return CompositionWitness(composite, tag, squares, pb_sq, mu)


def _compose_sqpo(r2: Rule, mu: SqpoRuleMatch, r1: Rule, tag: SemanticsTag,
                  ctx: CategoryCtx) -> CompositionWitness:
    ms, e1, aug = mu.multisum, mu.mipc1, mu.fpa_elem
    j2 = ms.in_left
    kappa1 = e1.alpha                       # K1 >-> Kbar1
    o_bar1 = e1.f_prime                     # Kbar1 -> J21
    cos2, sq2 = pushout(Span(kappa1, r1.input_morphism), ctx)
    i_prime = cos2.left                     # Kbar1 -> I1'
    gamma, g, e = aug.gamma, aug.g, aug.e   # Kbar1 >-> F, F -> I21, I1' ->> I21
    if e.dom != i_prime.cod:
        raise CatrewError("fpa element does not augment this pushout")
    sq3 = Square(i_prime, gamma, e, g)
    cos4, sq4 = pushout(Span(gamma, o_bar1), ctx)
    o_dbl = cos4.left                       # Kbar1'' -> Jbar21
    rho = cos4.right                        # J21 >-> Jbar21
    j2_aug = compose(rho, j2)               # I2 >-> Jbar21
    kappa2, i_bar2, sq5 = fpc(r2.input_morphism, j2_aug, ctx)
    cos6, sq6 = pushout(Span(kappa2, r2.output_morphism), ctx)
    o_bar2 = cos6.left                      # Kbarbar2 -> O21
    composite_span, pb_sq = span_compose(
        Span(o_bar2, i_bar2), Span(o_dbl, g), ctx)
    composite = Rule(composite_span.left, composite_span.right)
    squares = {
        "1": (e1.po_square, PUSHOUT),
        "2": (sq2, PUSHOUT),
        "3_fpa": (sq3, COMMUTES),
        "3_fpc": (aug.fpc_square, FPC),
        "4": (sq4, PUSHOUT),
        "5": (sq5, FPC),
        "6": (sq6, PUSHOUT),
    }
    return CompositionWitness(composite, tag, squares, pb_sq, mu)
