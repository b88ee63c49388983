"""Rules, matches, and direct derivations for the DPO and SqPO semantics.

A rule is a span output <- context -> input.  A direct derivation applies a
rule at a match by completing two squares: the input-side square is a chosen
pushout complement (DPO) or the final pullback complement (SqPO), and the
output-side square is always a pushout.  Which (category, semantics,
rule-class) combinations admit compositional operations is encoded in
:func:`supported`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from catrew.core import (
    GRAPH, CategoryCtx, CatrewError, ClassError, FinGraph, GraphMorphism,
    compose, diagram_canonical, enumerate_morphisms, identity,
)
from catrew.multi import MipcElement, multi_ipc
from catrew.universal import (
    COMMUTES, FPC, PULLBACK, PUSHOUT, Cospan, Span, Square, classify_square,
    fpc, is_pushout_square, mediating_into_pullback, pullback, pushout,
)

DPO = "dpo"
SQPO = "sqpo"

GENERIC = "generic"
INPUT_LINEAR = "input_linear"
OUTPUT_LINEAR = "output_linear"
SEMI_LINEAR = "semi_linear"
LINEAR = "linear"

RULE_CLASSES = (GENERIC, INPUT_LINEAR, OUTPUT_LINEAR, SEMI_LINEAR, LINEAR)


class UnsupportedSemanticsError(CatrewError):
    """The category lacks an axiom needed by the requested semantics."""

    def __init__(self, message: str, axiom: str):
        super().__init__(message)
        self.axiom = axiom


@dataclass(frozen=True)
class SemanticsTag:
    base: str
    rule_class: str

    def __post_init__(self):
        if self.base not in (DPO, SQPO):
            raise CatrewError(f"unknown semantics base {self.base!r}")
        if self.rule_class not in RULE_CLASSES:
            raise CatrewError(f"unknown rule class {self.rule_class!r}")


@dataclass(frozen=True)
class Rule:
    """A span of morphisms out of a shared context graph."""

    output_morphism: GraphMorphism
    input_morphism: GraphMorphism

    def __post_init__(self):
        if self.output_morphism.dom != self.input_morphism.dom:
            raise CatrewError("rule legs must share their context graph")

    @property
    def context(self) -> FinGraph:
        return self.output_morphism.dom

    @property
    def output(self) -> FinGraph:
        return self.output_morphism.cod

    @property
    def input(self) -> FinGraph:
        return self.input_morphism.cod

    @property
    def span(self) -> Span:
        return Span(self.output_morphism, self.input_morphism)

    def linearity(self, ctx: CategoryCtx) -> str:
        o = ctx.is_m(self.output_morphism)
        i = ctx.is_m(self.input_morphism)
        if o and i:
            return LINEAR
        if i:
            return INPUT_LINEAR
        if o:
            return OUTPUT_LINEAR
        return GENERIC

    def satisfies(self, rule_class: str, ctx: CategoryCtx) -> bool:
        lin = self.linearity(ctx)
        if rule_class == GENERIC:
            return True
        if rule_class == SEMI_LINEAR:
            return lin != GENERIC
        if rule_class == LINEAR:
            return lin == LINEAR
        return lin in (rule_class, LINEAR)

    def reversed(self) -> "Rule":
        return Rule(self.input_morphism, self.output_morphism)

    def canonical_key(self) -> bytes:
        return diagram_canonical(
            [self.context, self.output, self.input],
            [(0, 1, self.output_morphism), (0, 2, self.input_morphism)])


def identity_rule(g: FinGraph) -> Rule:
    return Rule(identity(g), identity(g))


def supported(ctx: CategoryCtx, tag: SemanticsTag, operation: str = "compose") -> Optional[str]:
    """None when supported; otherwise the name of the failing axiom.

    The multigraph category satisfies every requirement.  Simple graphs
    support all SqPO variants and the (semi-)linear DPO variants, but their
    pushouts along regular monos are not van Kampen, so compositional
    operations for generic DPO are refused.  Single rule application is
    definable regardless and is therefore always allowed.
    """
    if operation == "apply":
        return None
    if ctx.is_simple and tag.base == DPO and tag.rule_class == GENERIC:
        return "(L-iii)"
    return None


def require_supported(ctx: CategoryCtx, tag: SemanticsTag,
                      operation: str = "compose", force: bool = False) -> None:
    axiom = supported(ctx, tag, operation)
    if axiom is not None and not force:
        raise UnsupportedSemanticsError(
            f"category {ctx.kind!r} does not support compositional "
            f"{tag.rule_class} {tag.base} semantics: axiom {axiom} fails",
            axiom)


@dataclass(frozen=True)
class Match:
    """An M-morphism from the rule input; DPO also fixes a complement choice."""

    morphism: GraphMorphism
    mipc_choice: Optional[MipcElement] = None


@dataclass(frozen=True)
class DirectDerivation:
    """The two-square diagram of one rule application.

    ``square1`` sits over the input leg (FPC for SqPO, complement pushout for
    DPO); ``square2`` sits over the output leg and is always a pushout.
    """

    rule: Rule
    tag: SemanticsTag
    match: Match
    square1: Square
    square2: Square
    comatch: GraphMorphism

    def __post_init__(self):
        if self.square1.top != self.rule.input_morphism:
            raise CatrewError("input square does not sit over the input leg")
        if self.square2.top != self.rule.output_morphism:
            raise CatrewError("output square does not sit over the output leg")
        if self.square1.right != self.match.morphism:
            raise CatrewError("input square does not close at the match")
        if self.square2.right != self.comatch:
            raise CatrewError("output square does not close at the comatch")
        if self.square1.left != self.square2.left:
            raise CatrewError("squares disagree on the context morphism")

    @property
    def host(self) -> FinGraph:
        return self.match.morphism.cod

    @property
    def result(self) -> FinGraph:
        return self.comatch.cod

    @property
    def intermediate(self) -> FinGraph:
        return self.square1.left.cod

    @property
    def context_match(self) -> GraphMorphism:
        return self.square1.left


def enumerate_matches(rule: Rule, host: FinGraph, tag: SemanticsTag,
                      ctx: CategoryCtx, force: bool = False) -> list[Match]:
    """All admissible matches of the rule input into the host.

    SqPO admits every M-morphism; DPO pairs each M-morphism with each element
    of the multi-IPC of (input leg, match), carrying the choice explicitly.
    """
    require_supported(ctx, tag, "apply", force)
    if not rule.satisfies(tag.rule_class, ctx):
        raise ClassError(
            f"rule has linearity {rule.linearity(ctx)!r}, which does not "
            f"satisfy the requested class {tag.rule_class!r}")
    ctx.validate_graph(host)
    monos = enumerate_morphisms(rule.input, host, ctx, filter="regular_mono")
    if tag.base == SQPO:
        return [Match(m) for m in monos]
    out = []
    for m in monos:
        for elem in multi_ipc(rule.input_morphism, m, ctx):
            out.append(Match(m, elem))
    return out


def apply(rule: Rule, match: Match, tag: SemanticsTag,
          ctx: CategoryCtx, force: bool = False) -> DirectDerivation:
    """Run one direct derivation at the given match."""
    require_supported(ctx, tag, "apply", force)
    m = match.morphism
    if not ctx.is_m(m):
        raise ClassError("match must be an M-morphism")
    if m.dom != rule.input:
        raise ClassError("match does not start at the rule input")
    if tag.base == DPO:
        if match.mipc_choice is None:
            raise ClassError("a DPO match must carry its complement choice")
        elem = match.mipc_choice
        sq1 = elem.po_square
        if sq1.top != rule.input_morphism or sq1.right != m:
            raise ClassError("complement choice does not fit the rule and match")
        k_host = elem.alpha
    else:
        n, g, sq1 = fpc(rule.input_morphism, m, ctx)
        k_host = n
    cos, sq2 = pushout(Span(rule.output_morphism, k_host), ctx)
    # pushout of (o_r, k_host): left leg lands in the result from the output
    comatch = cos.left
    square2 = Square(rule.output_morphism, k_host, comatch, cos.right,
                     frozenset({COMMUTES, PUSHOUT}))
    if not ctx.is_m(comatch):
        raise ClassError("comatch fell outside the M class")
    return DirectDerivation(rule, tag, match, sq1, square2, comatch)


def apply_all(rule: Rule, host: FinGraph, tag: SemanticsTag,
              ctx: CategoryCtx, force: bool = False) -> list[DirectDerivation]:
    return [apply(rule, m, tag, ctx, force)
            for m in enumerate_matches(rule, host, tag, ctx, force)]


def is_reversible(d: DirectDerivation, ctx: CategoryCtx) -> bool:
    """True when the input-side square is also a pushout (always, for DPO)."""
    return PUSHOUT in classify_square(d.square1, ctx)


def hcompose(d2: DirectDerivation, d1: DirectDerivation,
             ctx: CategoryCtx) -> DirectDerivation:
    """Compose two derivations sharing their middle host morphism.

    d1 rewrites X0 to X1 and d2 rewrites X1 further; d2's rule input must be
    d1's rule output, matched by d1's comatch.
    """
    if d1.tag != d2.tag:
        raise CatrewError("derivations carry different semantics tags")
    if d2.rule.input != d1.rule.output or d2.match.morphism != d1.comatch:
        raise CatrewError(
            "derivations do not share their interface: the second match must "
            "be the first comatch on the same object")
    tag = d1.tag
    # rule-level and host-level interface pullbacks
    rule_span, rule_sq = pullback(
        Cospan(d2.rule.input_morphism, d1.rule.output_morphism), ctx)
    host_span, host_sq = pullback(
        Cospan(d2.square1.bottom, d1.square2.bottom), ctx)
    apex_map = mediating_into_pullback(
        host_sq, Span(compose(d2.square1.left, rule_span.left),
                      compose(d1.square2.left, rule_span.right)))
    sq_input_p = Square(rule_span.right, apex_map, d1.square2.left, host_span.right)
    sq_output_p = Square(rule_span.left, apex_map, d2.square1.left, host_span.left)
    want1 = PUSHOUT if tag.base == DPO else FPC
    if want1 not in classify_square(sq_input_p, ctx):
        raise CatrewError("interface square over the first rule failed to verify")
    if PUSHOUT not in classify_square(sq_output_p, ctx):
        raise CatrewError("interface square over the second rule failed to verify")
    composite_rule = Rule(compose(d2.rule.output_morphism, rule_span.left),
                          compose(d1.rule.input_morphism, rule_span.right))
    square1 = sq_input_p.hpaste(d1.square1).with_kinds(
        {COMMUTES, PUSHOUT} if tag.base == DPO else {COMMUTES, PULLBACK, FPC})
    square2 = sq_output_p.hpaste(d2.square2).with_kinds({COMMUTES, PUSHOUT})
    match = Match(d1.match.morphism,
                  None if tag.base == SQPO else MipcElement(
                      square1.left, square1.bottom, square1))
    return DirectDerivation(composite_rule, tag, match, square1, square2,
                            d2.comatch)
