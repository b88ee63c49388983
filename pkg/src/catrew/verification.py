"""Concurrency synthesis and analysis, associativity checks, and oracles.

The synthesis and analysis operations implement the two directions of the
concurrency theorem step by step; every square produced along the way is
re-verified against its required kind, so a successful run is itself an
executable proof sketch for the instance at hand.  The brute-force oracles
recompute the multi-universal families by exhaustive search over small
graphs, independently of the constructions they are checked against.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from catrew.core import (
    EMPTY_GRAPH, GRAPH, SGRAPH, CategoryCtx, CatrewError, FinGraph,
    GraphMorphism, IsoCertificate, canonical_form, compose, enumerate_graphs,
    enumerate_morphisms, find_isomorphism, identity, identity_certificate,
    m_subobjects, morphisms_with_equations,
)
from catrew.composition import (
    CompositionWitness, DpoRuleMatch, SqpoRuleMatch, VerificationError,
    compose_rules, enumerate_rule_matches, rule_match_key, span_compose,
)
from catrew.multi import (
    FpaElement, MipcElement, MultiSumElement, fpa, mipc_equivalent, multi_ipc,
    multi_sum, multisum_element_of, multisum_factorize, _cospan_key,
)
from catrew.rewriting import (
    DPO, GENERIC, INPUT_LINEAR, LINEAR, OUTPUT_LINEAR, SEMI_LINEAR, SQPO,
    DirectDerivation, Match, Rule, SemanticsTag, apply, enumerate_matches,
    require_supported,
)
from catrew.universal import (
    COMMUTES, FPC, PULLBACK, PUSHOUT, Cospan, Span, Square, classify_square,
    em_factorize, fpc, is_bijective, is_pullback_square, is_pushout_square,
    mediating_into_pullback, mediating_out_of_pushout, pullback, pushout,
)


@dataclass(frozen=True)
class TwoStepDerivation:
    first: DirectDerivation
    second: DirectDerivation

    def __post_init__(self):
        if self.second.host != self.first.result:
            raise CatrewError("second derivation does not start at the first's result")


@dataclass(frozen=True)
class SynthesisResult:
    rule_match: object
    composite: CompositionWitness
    m21: Match
    derivation: DirectDerivation
    iso_to_x2: IsoCertificate


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise VerificationError(message)


def _verify_kind(sq: Square, want: str, ctx: CategoryCtx, label: str) -> Square:
    kinds = classify_square(sq, ctx)
    _require(want in kinds, f"square {label} should be a {want}, got {sorted(kinds)}")
    return sq.with_kinds(kinds)


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def synthesize(ts: TwoStepDerivation, tag: SemanticsTag, ctx: CategoryCtx,
               force: bool = False) -> SynthesisResult:
    """Fold a two-step derivation into one step along a composite rule."""
    require_supported(ctx, tag, "compose", force)
    d1, d2 = ts.first, ts.second
    ms, w = multisum_element_of(Cospan(d2.match.morphism, d1.comatch), ctx)
    j2, j1 = ms.in_left, ms.in_right

    # factor both derivations through the overlap
    span1, pbsq1 = pullback(Cospan(w, d1.square2.bottom), ctx)
    p_j1, p_k1 = span1.left, span1.right
    kappa1 = mediating_into_pullback(
        pbsq1, Span(compose(j1, d1.rule.output_morphism), d1.context_match))
    _require(ctx.is_m(kappa1), "context comparison for the first rule not in M")
    sq_1_1 = _verify_kind(Square(d1.rule.output_morphism, kappa1, j1, p_j1),
                          PUSHOUT, ctx, "(1_1)")
    _verify_kind(Square(p_j1, p_k1, w, d1.square2.bottom), PUSHOUT, ctx, "(2_1)")

    span2, pbsq2 = pullback(Cospan(d2.square1.bottom, w), ctx)
    p_k2, p_j2 = span2.left, span2.right
    kappa2 = mediating_into_pullback(
        pbsq2, Span(d2.context_match, compose(j2, d2.rule.input_morphism)))
    _require(ctx.is_m(kappa2), "context comparison for the second rule not in M")
    want_star = PUSHOUT if tag.base == DPO else FPC
    sq_1_2 = _verify_kind(Square(d2.rule.input_morphism, kappa2, j2, p_j2),
                          want_star, ctx, "(1_2)")
    _verify_kind(Square(p_j2, p_k2, w, d2.square1.bottom), want_star, ctx, "(2_2)")

    # extend to the composite rule boundary
    cos31, sq_3_1 = pushout(Span(kappa1, d1.rule.input_morphism), ctx)
    i_bar1, iota1 = cos31.left, cos31.right
    u = mediating_out_of_pushout(
        sq_3_1, Cospan(compose(d1.square1.bottom, p_k1), d1.match.morphism))
    cos32, sq_3_2 = pushout(Span(kappa2, d2.rule.output_morphism), ctx)
    o_bar2, omega2 = cos32.left, cos32.right
    v = mediating_out_of_pushout(
        sq_3_2, Cospan(compose(d2.square2.bottom, p_k2), d2.comatch))
    _require(ctx.is_m(v), "comatch of the composite not in M")

    if tag.base == DPO:
        return _synthesize_dpo(ts, tag, ctx, ms, w, kappa1, kappa2,
                               span1, span2, sq_1_1, sq_1_2, sq_3_1, sq_3_2,
                               i_bar1, iota1, u, o_bar2, omega2, v)
    return _synthesize_sqpo(ts, tag, ctx, ms, w, kappa1, kappa2,
                            span1, span2, sq_1_1, sq_3_1, sq_3_2,
                            i_bar1, iota1, u, o_bar2, omega2, v)


def _synthesize_dpo(ts, tag, ctx, ms, w, kappa1, kappa2, span1, span2,
                    sq_1_1, sq_1_2, sq_3_1, sq_3_2,
                    i_bar1, iota1, u, o_bar2, omega2, v) -> SynthesisResult:
    d1, d2 = ts.first, ts.second
    p_j1, p_k1 = span1.left, span1.right
    p_k2, p_j2 = span2.left, span2.right
    _require(ctx.is_m(u), "composite match fell outside M in the DPO case")
    sq_4_1 = _verify_kind(Square(i_bar1, p_k1, u, d1.square1.bottom),
                          PUSHOUT, ctx, "(4_1)")
    sq_4_2 = _verify_kind(Square(o_bar2, p_k2, v, d2.square2.bottom),
                          PUSHOUT, ctx, "(4_2)")
    rule_span, pb_sq = span_compose(Span(o_bar2, p_j2), Span(p_j1, i_bar1), ctx)
    composite = Rule(rule_span.left, rule_span.right)
    pi2, pi1 = pb_sq.left, pb_sq.top
    host_span, host_pb = pullback(
        Cospan(d2.square1.bottom, d1.square2.bottom), ctx)
    chi = mediating_into_pullback(
        host_pb, Span(compose(p_k2, pi2), compose(p_k1, pi1)))
    sq_7_1 = Square(pi1, chi, p_k1, host_span.right)
    sq_7_2 = Square(pi2, chi, p_k2, host_span.left)
    square1 = _verify_kind(sq_7_1.hpaste(sq_4_1), PUSHOUT, ctx, "composite (*)")
    square2 = _verify_kind(sq_7_2.hpaste(sq_4_2), PUSHOUT, ctx, "composite (+)")
    mipc1 = MipcElement(kappa1, p_j1, sq_1_1)
    mipc2 = MipcElement(kappa2, p_j2, sq_1_2)
    witness = CompositionWitness(
        composite, tag,
        {"1_2": (sq_1_2, PUSHOUT), "1_1": (sq_1_1, PUSHOUT),
         "2_2": (sq_3_2, PUSHOUT), "2_1": (sq_3_1, PUSHOUT)},
        pb_sq, DpoRuleMatch(ms, mipc2, mipc1))
    match = Match(u, MipcElement(square1.left, square1.bottom, square1))
    derivation = DirectDerivation(composite, tag, match, square1, square2, v)
    _require(derivation.result == d2.result, "synthesized result changed object")
    return SynthesisResult(witness.rule_match, witness, match, derivation,
                           identity_certificate(d2.result))


def _synthesize_sqpo(ts, tag, ctx, ms, w, kappa1, kappa2, span1, span2,
                     sq_1_1, sq_3_1, sq_3_2,
                     i_bar1, iota1, u, o_bar2, omega2, v) -> SynthesisResult:
    d1, d2 = ts.first, ts.second
    p_j1, p_k1 = span1.left, span1.right
    p_k2, p_j2 = span2.left, span2.right
    # the composite match need not be monic: factor it and back-propagate
    e21, m21 = em_factorize(u, ctx)
    q_span, q_pb = pullback(Cospan(m21, d1.square1.bottom), ctx)
    q_i, q_k = q_span.left, q_span.right
    psi1 = mediating_into_pullback(q_pb, Span(compose(e21, i_bar1), p_k1))
    _require(ctx.is_m(psi1), "augmentation comparison not in M")
    sq_4_1pp = _verify_kind(Square(q_i, q_k, m21, d1.square1.bottom),
                            FPC, ctx, "(4_1'')")
    m_comp = compose(e21, iota1)
    _require(ctx.is_m(m_comp), "augmented rule input morphism not in M")
    fpa_fpc = _verify_kind(Square(d1.rule.input_morphism,
                                  compose(psi1, kappa1), m_comp, q_i),
                           FPC, ctx, "FPA fpc square")
    fpa_elem = FpaElement(psi1, q_i, e21, fpa_fpc)

    cos_bp, sq_4 = pushout(Span(psi1, p_j1), ctx)
    o_dbl, rho = cos_bp.left, cos_bp.right
    wbar = mediating_out_of_pushout(
        sq_4, Cospan(compose(d1.square2.bottom, q_k), w))
    _require(ctx.is_m(wbar), "augmented overlap embedding not in M")
    _verify_kind(Square(o_dbl, q_k, wbar, d1.square2.bottom),
                 PUSHOUT, ctx, "(2_1'')")

    q2_span, q2_pb = pullback(Cospan(wbar, d2.square1.bottom), ctx)
    q2_j, q2_k = q2_span.left, q2_span.right
    psi2 = mediating_into_pullback(q2_pb, Span(compose(rho, p_j2), p_k2))
    _verify_kind(Square(q2_j, q2_k, wbar, d2.square1.bottom), FPC, ctx, "(2_2'')")
    kappa2_dbl = compose(psi2, kappa2)
    sq_5 = _verify_kind(Square(d2.rule.input_morphism, kappa2_dbl,
                               compose(rho, ms.in_left), q2_j),
                        FPC, ctx, "(5)")
    cos_o, sq_4_2p = pushout(Span(psi2, o_bar2), ctx)
    o_dbl2, sigma = cos_o.left, cos_o.right
    vbar = mediating_out_of_pushout(
        sq_4_2p, Cospan(compose(d2.square2.bottom, q2_k), v))
    _require(ctx.is_m(vbar), "augmented comatch not in M")
    sq_4_2pp = _verify_kind(Square(o_dbl2, q2_k, vbar, d2.square2.bottom),
                            PUSHOUT, ctx, "(4_2'')")
    sq_6 = _verify_kind(Square(d2.rule.output_morphism, kappa2_dbl,
                               compose(sigma, omega2), o_dbl2),
                        PUSHOUT, ctx, "(6)")

    rule_span, pb_sq = span_compose(Span(o_dbl2, q2_j), Span(o_dbl, q_i), ctx)
    composite = Rule(rule_span.left, rule_span.right)
    pi2, pi1 = pb_sq.left, pb_sq.top
    host_span, host_pb = pullback(
        Cospan(d2.square1.bottom, d1.square2.bottom), ctx)
    chi = mediating_into_pullback(
        host_pb, Span(compose(q2_k, pi2), compose(q_k, pi1)))
    sq_7_1 = Square(pi1, chi, q_k, host_span.right)
    sq_7_2 = Square(pi2, chi, q2_k, host_span.left)
    square1 = _verify_kind(sq_7_1.hpaste(sq_4_1pp), FPC, ctx, "composite (*)")
    square2 = _verify_kind(sq_7_2.hpaste(sq_4_2pp), PUSHOUT, ctx, "composite (+)")
    mipc1 = MipcElement(kappa1, p_j1, sq_1_1)
    witness = CompositionWitness(
        composite, tag,
        {"1": (sq_1_1, PUSHOUT), "2": (sq_3_1, PUSHOUT),
         "3_fpa": (Square(i_bar1, psi1, e21, q_i), COMMUTES),
         "3_fpc": (fpa_fpc, FPC), "4": (sq_4, PUSHOUT),
         "5": (sq_5, FPC), "6": (sq_6, PUSHOUT)},
        pb_sq, SqpoRuleMatch(ms, mipc1, fpa_elem))
    match = Match(m21)
    derivation = DirectDerivation(composite, tag, match, square1, square2, vbar)
    _require(derivation.result == d2.result, "synthesized result changed object")
    return SynthesisResult(witness.rule_match, witness, match, derivation,
                           identity_certificate(d2.result))


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------

def analyze(witness: CompositionWitness, derivation: DirectDerivation,
            ctx: CategoryCtx, force: bool = False) -> TwoStepDerivation:
    """Split a derivation along a composite rule back into two steps."""
    require_supported(ctx, witness.tag, "compose", force)
    if derivation.rule != witness.composite:
        raise CatrewError("derivation is not along the witnessed composite rule")
    if witness.tag.base == DPO:
        return _analyze_dpo(witness, derivation, ctx)
    return _analyze_sqpo(witness, derivation, ctx)


def _split_result_step(rule: Rule, match_m: GraphMorphism, sq1: Square,
                       tag: SemanticsTag, ctx: CategoryCtx) -> DirectDerivation:
    """Close a reconstructed step with its canonical output pushout."""
    cos, _ = pushout(Span(rule.output_morphism, sq1.left), ctx)
    comatch = cos.left
    square2 = Square(rule.output_morphism, sq1.left, comatch, cos.right)
    match = Match(match_m, None if tag.base == SQPO
                  else MipcElement(sq1.left, sq1.bottom, sq1))
    return DirectDerivation(rule, tag, match, sq1, square2, comatch)


def _analyze_sqpo(witness, derivation, ctx) -> TwoStepDerivation:
    tag = witness.tag
    sq1 = witness.squares["1"][0]
    sq2 = witness.squares["2"][0]
    sq3 = witness.squares["3_fpa"][0]
    sq4 = witness.squares["4"][0]
    sq5 = witness.squares["5"][0]
    sq6 = witness.squares["6"][0]
    r1 = Rule(sq1.top, sq2.top)
    r2 = Rule(sq6.top, sq5.top)
    g = sq3.bottom                 # Kbar1'' -> I21
    o_dbl = sq4.bottom             # Kbar1'' -> Jbar21
    i_bar2 = sq5.bottom            # Kbarbar2 -> Jbar21
    o_bar2 = sq6.bottom            # Kbarbar2 -> O21
    m21 = derivation.match.morphism
    # reconstruct the intermediate objects
    n9, g9, sq9 = fpc(g, m21, ctx)
    cos10, sq10 = pushout(Span(n9, o_dbl), ctx)
    x0bar_in, jbar_in = cos10.left, cos10.right     # Xbar0 -> X1', Jbar21 -> X1'
    n11, g11, sq11 = fpc(i_bar2, jbar_in, ctx)
    # first step
    k1_ctx = compose(n9, compose(sq3.left, sq2.left))
    match1 = compose(m21, compose(sq3.right, sq2.right))
    d1_sq1 = _verify_kind(Square(r1.input_morphism, k1_ctx, match1, g9),
                          FPC, ctx, "analysis (1*)")
    comatch1 = compose(jbar_in, compose(sq4.right, sq1.right))
    d1_sq2 = _verify_kind(Square(r1.output_morphism, k1_ctx, comatch1, x0bar_in),
                          PUSHOUT, ctx, "analysis (1+)")
    d1 = DirectDerivation(r1, tag, Match(match1), d1_sq1, d1_sq2, comatch1)
    # second step
    k2_ctx = compose(n11, sq5.left)
    match2 = compose(jbar_in, sq5.right)
    d2_sq1 = _verify_kind(Square(r2.input_morphism, k2_ctx, match2, g11),
                          FPC, ctx, "analysis (2*)")
    d2 = _split_result_step(r2, match2, d2_sq1, tag, ctx)
    ts = TwoStepDerivation(d1, d2)
    _require(find_isomorphism(d2.result, derivation.result) is not None,
             "analysis did not reproduce the composite result")
    return ts


def _analyze_dpo(witness, derivation, ctx) -> TwoStepDerivation:
    tag = witness.tag
    sq_1_2 = witness.squares["1_2"][0]
    sq_1_1 = witness.squares["1_1"][0]
    sq_2_2 = witness.squares["2_2"][0]
    sq_2_1 = witness.squares["2_1"][0]
    r2 = Rule(sq_2_2.top, sq_1_2.top)
    r1 = Rule(sq_1_1.top, sq_2_1.top)
    i_bar = sq_2_1.bottom          # Kbar1 -> I21
    o_bar = sq_2_2.bottom          # Kbar2 -> O21
    pb_sq = witness.pullback_square
    pi2, pi1 = pb_sq.left, pb_sq.top
    chi = derivation.square1.left  # K21 -> Ybar
    m21 = derivation.match.morphism
    cos91, sq91 = pushout(Span(pi1, chi), ctx)
    kbar1_in, y_in1 = cos91.left, cos91.right       # Kbar1 -> Xbar0, Ybar -> Xbar0
    x0bar_to_x0 = mediating_out_of_pushout(
        sq91, Cospan(compose(m21, i_bar), derivation.square1.bottom))
    cos92, sq92 = pushout(Span(pi2, chi), ctx)
    kbar2_in, y_in2 = cos92.left, cos92.right       # Kbar2 -> Xbar1, Ybar -> Xbar1
    cos10, sq10 = pushout(Span(kbar1_in, sq_1_1.bottom), ctx)
    x0bar_in, j_in = cos10.left, cos10.right        # Xbar0 -> X1', J21 -> X1'
    xbar1_to_x1 = mediating_out_of_pushout(
        sq92, Cospan(compose(j_in, sq_1_2.bottom),
                     compose(x0bar_in, y_in1)))
    # first step
    k1_ctx = compose(kbar1_in, sq_1_1.left)
    match1 = compose(m21, sq_2_1.right)
    d1_sq1 = _verify_kind(Square(r1.input_morphism, k1_ctx, match1, x0bar_to_x0),
                          PUSHOUT, ctx, "analysis (1*)")
    comatch1 = compose(j_in, sq_1_1.right)
    d1_sq2 = _verify_kind(Square(r1.output_morphism, k1_ctx, comatch1, x0bar_in),
                          PUSHOUT, ctx, "analysis (1+)")
    d1 = DirectDerivation(r1, tag, Match(match1, MipcElement(
        k1_ctx, d1_sq1.bottom, d1_sq1)), d1_sq1, d1_sq2, comatch1)
    # second step
    k2_ctx = compose(kbar2_in, sq_1_2.left)
    match2 = compose(j_in, sq_1_2.right)
    d2_sq1 = _verify_kind(Square(r2.input_morphism, k2_ctx, match2, xbar1_to_x1),
                          PUSHOUT, ctx, "analysis (2*)")
    d2 = _split_result_step(r2, match2, d2_sq1, tag, ctx)
    ts = TwoStepDerivation(d1, d2)
    _require(find_isomorphism(d2.result, derivation.result) is not None,
             "analysis did not reproduce the composite result")
    return ts


# ---------------------------------------------------------------------------
# associativity
# ---------------------------------------------------------------------------

@dataclass
class AssocReport:
    left_classes: Counter
    right_classes: Counter
    complete: bool

    @property
    def equal(self) -> bool:
        return self.complete and self.left_classes == self.right_classes


class _Capped(Exception):
    pass


def associativity_check(r3: Rule, r2: Rule, r1: Rule, tag: SemanticsTag,
                        ctx: CategoryCtx, cap: int = 20000,
                        family_cap: int = 3000,
                        force: bool = False) -> AssocReport:
    """Compare composite-rule iso classes of ((r3 . r2) . r1) and (r3 . (r2 . r1)).

    Both nesting orders enumerate all admissible matches at both levels; the
    multisets of span canonical forms must agree.  Exceeding either cap makes
    the report incomplete rather than wrong.
    """
    from catrew.core import ResourceLimitError

    require_supported(ctx, tag, "compose", force)
    budget = [cap]

    def spend():
        budget[0] -= 1
        if budget[0] < 0:
            raise _Capped()

    left: Counter = Counter()
    right: Counter = Counter()
    complete = True
    try:
        for mu32 in enumerate_rule_matches(r3, r2, tag, ctx, force, family_cap):
            w32 = compose_rules(r3, mu32, r2, tag, ctx, force, verify=False)
            for nu in enumerate_rule_matches(w32.composite, r1, tag, ctx,
                                             force, family_cap):
                spend()
                w = compose_rules(w32.composite, nu, r1, tag, ctx, force,
                                  verify=False)
                left[w.composite.canonical_key()] += 1
        for mu21 in enumerate_rule_matches(r2, r1, tag, ctx, force, family_cap):
            w21 = compose_rules(r2, mu21, r1, tag, ctx, force, verify=False)
            for nu in enumerate_rule_matches(r3, w21.composite, tag, ctx,
                                             force, family_cap):
                spend()
                w = compose_rules(r3, nu, w21.composite, tag, ctx, force,
                                  verify=False)
                right[w.composite.canonical_key()] += 1
    except (_Capped, ResourceLimitError):
        complete = False
    return AssocReport(left, right, complete)


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

def oracle_pushout_complements(f: GraphMorphism, beta: GraphMorphism,
                               bound: tuple[int, int],
                               ctx: CategoryCtx) -> list[MipcElement]:
    """Exhaustive pushout-complement search over all graphs within the bound."""
    bprime = beta.cod
    target = compose(beta, f)
    out: list[MipcElement] = []
    for z in enumerate_graphs(bound[0], bound[1], ctx.kind):
        for alpha in enumerate_morphisms(f.dom, z, ctx, filter="regular_mono"):
            for g in morphisms_with_equations(z, bprime,
                                              pinned=[(alpha, target)]):
                sq = Square(f, alpha, beta, g)
                if not is_pushout_square(sq, ctx):
                    continue
                cand = MipcElement(alpha, g, sq)
                if not any(mipc_equivalent(cand, seen) for seen in out):
                    out.append(cand)
    return out


def oracle_multisum(a: FinGraph, b: FinGraph, bound: tuple[int, int],
                    ctx: CategoryCtx) -> list[MultiSumElement]:
    """Factorize every bounded cospan of M-morphisms and collect the middles."""
    found: dict[bytes, MultiSumElement] = {}
    for z in enumerate_graphs(bound[0], bound[1], ctx.kind):
        for fa in enumerate_morphisms(a, z, ctx, filter="regular_mono"):
            for fb in enumerate_morphisms(b, z, ctx, filter="regular_mono"):
                elem, _ = multisum_element_of(Cospan(fa, fb), ctx)
                key = _cospan_key(a, b, elem.in_left, elem.in_right)
                if key not in found:
                    found[key] = elem
    return [found[k] for k in sorted(found)]


def families_equal(fam1: list, fam2: list, equiv: Callable) -> bool:
    """Bijective matching of two families under an equivalence predicate."""
    if len(fam1) != len(fam2):
        return False
    remaining = list(range(len(fam2)))
    for x in fam1:
        hit = next((i for i in remaining if equiv(x, fam2[i])), None)
        if hit is None:
            return False
        remaining.remove(hit)
    return True


# ---------------------------------------------------------------------------
# bounded universal-property spot check for FPCs
# ---------------------------------------------------------------------------

def fpc_universal_spot_check(sq: Square, ctx: CategoryCtx, seed: int = 0,
                             samples: int = 3) -> bool:
    """Test the FPC universal property against a bounded set of completions.

    Quantifying over all graphs is infeasible, so the completions are the two
    canonical ones plus seeded subgraph probes within |F| + 2 on both sizes.
    An under-approximation by design; soundness of the constructor comes from
    the classifier-based construction itself.
    """
    f, n, m, g = sq.top, sq.left, sq.right, sq.bottom
    fobj = n.cod
    rng = random.Random(seed)
    probes: list[GraphMorphism] = [g, identity(g.cod)]
    subs = m_subobjects(g.cod, ctx)
    for _ in range(samples):
        if subs:
            probes.append(subs[rng.randrange(len(subs))])
    for w in probes:
        span, pbsq = pullback(Cospan(w, m), ctx)
        p_x, p_b = span.left, span.right
        for h in morphisms_with_equations(span.apex, f.dom,
                                          post=[(f, p_b)]):
            want = compose(n, h)
            mediators = morphisms_with_equations(
                w.dom, fobj, pinned=[(p_x, want)], post=[(g, w)])
            if len(mediators) != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------

def generate_graph(rng: random.Random, bounds: tuple[int, int],
                   ctx: CategoryCtx, min_vertices: int = 0) -> FinGraph:
    nv = rng.randint(min_vertices, max(bounds[0], min_vertices))
    vs = [f"v{i}" for i in range(nv)]
    pairs = [(s, t) for s in vs for t in vs]
    edges = {}
    if pairs:
        ne = rng.randint(0, bounds[1])
        if ctx.is_simple:
            chosen = rng.sample(pairs, min(ne, len(pairs)))
        else:
            chosen = [rng.choice(pairs) for _ in range(ne)]
        for i, st in enumerate(sorted(chosen)):
            edges[f"e{i}"] = st
    return FinGraph(vs, edges)


def generate_morphism_from(rng: random.Random, g: FinGraph, ctx: CategoryCtx,
                           monic: bool = False, extra: tuple[int, int] = (1, 1),
                           m_class: bool = False) -> GraphMorphism:
    """A random morphism out of g: an optional collapse followed by extension."""
    vs = sorted(g.vertices)
    if monic or m_class:
        vmap = {v: v for v in vs}
    else:
        reps = vs[:]
        vmap = {}
        for v in vs:
            vmap[v] = rng.choice(reps[:max(1, len(reps))])
    verts = set(vmap.values())
    edges = {}
    emap = {}
    for e in sorted(g.edges):
        s, t = g.edges[e]
        key = (vmap[s], vmap[t])
        if monic or m_class:
            edges[e] = key
            emap[e] = e
        else:
            existing = [d for d, st in edges.items() if st == key]
            if ctx.is_simple and existing:
                emap[e] = existing[0]
            elif existing and rng.random() < 0.4:
                emap[e] = rng.choice(existing)
            else:
                name = f"q{e}"
                edges[name] = key
                emap[e] = name
    # extension: fresh vertices and edges
    from catrew.core import fresh_id
    for i in range(rng.randint(0, extra[0])):
        verts.add(fresh_id(f"x{i}", verts))
    vlist = sorted(verts)
    for i in range(rng.randint(0, extra[1])):
        if not vlist:
            break
        s, t = rng.choice(vlist), rng.choice(vlist)
        if m_class and s in set(vmap.values()) and t in set(vmap.values()):
            continue
        if ctx.is_simple and any(st == (s, t) for st in edges.values()):
            continue
        edges[fresh_id(f"y{i}", edges)] = (s, t)
    cod = FinGraph(verts, edges)
    return GraphMorphism(g, cod, vmap, emap)


def generate_rule(rng: random.Random, bounds: tuple[int, int],
                  ctx: CategoryCtx, linearity: str = GENERIC) -> Rule:
    k = generate_graph(rng, (max(1, bounds[0] - 1), max(0, bounds[1] - 1)), ctx)
    def leg(mono_leg: bool) -> GraphMorphism:
        return generate_morphism_from(rng, k, ctx, m_class=mono_leg)
    if linearity == LINEAR:
        return Rule(leg(True), leg(True))
    if linearity == INPUT_LINEAR:
        return Rule(leg(False), leg(True))
    if linearity == OUTPUT_LINEAR:
        return Rule(leg(True), leg(False))
    if linearity == SEMI_LINEAR:
        return generate_rule(rng, bounds, ctx,
                             INPUT_LINEAR if rng.random() < 0.5 else OUTPUT_LINEAR)
    return Rule(leg(False), leg(False))


def generate(kind: str, seed: int, bounds: tuple[int, int], ctx: CategoryCtx,
             linearity: str = GENERIC):
    """Deterministic random instances: graphs, rules, spans, square premises."""
    rng = random.Random((seed, kind, ctx.kind, linearity).__repr__())
    if kind == "graph":
        return generate_graph(rng, bounds, ctx)
    if kind == "rule":
        return generate_rule(rng, bounds, ctx, linearity)
    if kind == "span":
        r = generate_rule(rng, bounds, ctx, linearity)
        return r.span
    if kind == "square_premise":
        g = generate_graph(rng, bounds, ctx, min_vertices=1)
        subs = m_subobjects(g, ctx)
        m = subs[rng.randrange(len(subs))]
        f = generate_morphism_from(rng, m.dom, ctx)
        return Span(f, m)
    raise CatrewError(f"unknown generation kind {kind!r}")


def generate_two_step(seed: int, bounds: tuple[int, int], tag: SemanticsTag,
                      ctx: CategoryCtx, attempts: int = 60) -> Optional[TwoStepDerivation]:
    """A seeded two-step derivation, or None if no attempt admits matches."""
    for trial in range(attempts):
        rng = random.Random((seed, trial, tag.base, tag.rule_class, ctx.kind).__repr__())
        r1 = generate_rule(rng, bounds, ctx, tag.rule_class)
        r2 = generate_rule(rng, bounds, ctx, tag.rule_class)
        host = generate_graph(rng, bounds, ctx, min_vertices=1)
        try:
            ms1 = enumerate_matches(r1, host, tag, ctx)
        except CatrewError:
            continue
        if not ms1:
            continue
        d1 = apply(r1, ms1[rng.randrange(len(ms1))], tag, ctx)
        ms2 = enumerate_matches(r2, d1.result, tag, ctx)
        if not ms2:
            continue
        d2 = apply(r2, ms2[rng.randrange(len(ms2))], tag, ctx)
        return TwoStepDerivation(d1, d2)
    return None


# ---------------------------------------------------------------------------
# fibration-property harnesses
# ---------------------------------------------------------------------------

def _unique_mediating_square(elem: MipcElement, target: MipcElement,
                             over: GraphMorphism, ctx: CategoryCtx,
                             via: Optional[GraphMorphism] = None) -> list[GraphMorphism]:
    """Mediating pushout squares from one complement element into another.

    A hit is an M-morphism h between the complement objects whose square over
    ``over`` is a pushout and which restricts along ``elem.alpha`` to ``via``
    (by default the target's own inclusion).
    """
    hits = []
    for h in morphisms_with_equations(
            elem.alpha.cod, target.alpha.cod,
            pinned=[(elem.alpha, via if via is not None else target.alpha)],
            post=[(target.f_prime, compose(over, elem.f_prime))]):
        if not ctx.is_m(h):
            continue
        sq = Square(elem.f_prime, h, over, target.f_prime)
        if is_pushout_square(sq, ctx):
            hits.append(h)
    return hits


def check_mof_lifting(instance: dict, ctx: CategoryCtx) -> bool:
    """Multi-opfibration property of complements of composable M-morphisms.

    Exactly one element of the complement family of (f, beta) admits a
    mediating pushout square over beta2 into the given total complement,
    and that mediating square is unique.
    """
    f, beta, beta2 = instance["f"], instance["beta"], instance["beta2"]
    target = instance["target"]
    total = 0
    for elem in multi_ipc(f, beta, ctx):
        total += len(_unique_mediating_square(elem, target, beta2, ctx))
    return total == 1


def check_rmof_lifting(instance: dict, ctx: CategoryCtx) -> bool:
    """Residual lifting: the canonical vertical factorization of an FPC square
    through a factorization of its source M-morphism, with iso residues.
    """
    f, a1, a2, b = instance["f"], instance["a1"], instance["a2"], instance["b"]
    n_full, f_dd, sigma = fpc(f, b, ctx)
    if compose(a2, a1) != n_full:
        return False
    cos, po_sq = pushout(Span(a1, f), ctx)
    p_a1, p_b = cos.left, cos.right
    beta_p = mediating_out_of_pushout(po_sq, Cospan(compose(f_dd, a2), b))
    e_part, m_part = em_factorize(beta_p, ctx)
    span, pb_sq = pullback(Cospan(f_dd, m_part), ctx)
    p1, p2 = span.left, span.right
    iota = mediating_into_pullback(pb_sq, Span(a2, compose(e_part, p_a1)))
    if not ctx.is_m(iota):
        return False
    layer3 = Square(p2, p1, m_part, f_dd)
    if FPC not in classify_square(layer3, ctx):
        return False
    layer1 = Square(f, a1, p_b, p_a1)
    layer2 = Square(p_a1, iota, e_part, p2)
    upper = layer1.vpaste(layer2)
    if FPC not in classify_square(upper, ctx):
        return False
    pasted = upper.vpaste(layer3)
    if (pasted.left != n_full or pasted.right != b
            or pasted.bottom != f_dd or pasted.top != f):
        return False
    # residues of the same pushout square factor through each other only by isos
    elems = fpa(layer1, ctx, cap=400)
    for ej in elems:
        for ek in elems:
            for eps in morphisms_with_equations(
                    ej.e.cod, ek.e.cod, pinned=[(ej.e, ek.e)]):
                if not is_bijective(eps):
                    return False
    return True


def check_bcc1(instance: dict, ctx: CategoryCtx) -> bool:
    """The op-Cartesian conclusion: the back square of the premise cube is a
    pushout whenever the front is and the flanks are FPCs."""
    back = instance["back"]
    return PUSHOUT in classify_square(back, ctx)


def check_bcc2(instance: dict, ctx: CategoryCtx) -> bool:
    """The Cartesian conclusion: the left square is an FPC whenever the right
    one is and front and back are pushouts."""
    left = instance["left"]
    return FPC in classify_square(left, ctx)


def check_pb_splitting(instance: dict, ctx: CategoryCtx) -> bool:
    """Pullback-splitting for the complement family over a base pullback."""
    f, beta = instance["f"], instance["beta"]
    g1, g2 = instance["g1"], instance["g2"]
    h1, h2 = instance["h1"], instance["h2"]
    target = instance["target"]
    over = compose(h1, g1)
    picked = None
    for elem in multi_ipc(f, beta, ctx):
        meds = _unique_mediating_square(elem, target, over, ctx)
        if meds:
            if picked is not None or len(meds) != 1:
                return False
            picked = (elem, meds[0])
    if picked is None:
        return False
    elem_j, med_j = picked
    lift1 = lift2 = None
    for elem in multi_ipc(elem_j.f_prime, g1, ctx):
        meds = _unique_mediating_square(elem, target, h1, ctx, via=med_j)
        if meds:
            if lift1 is not None or len(meds) != 1:
                return False
            lift1 = (elem, meds[0])
    for elem in multi_ipc(elem_j.f_prime, g2, ctx):
        meds = _unique_mediating_square(elem, target, h2, ctx, via=med_j)
        if meds:
            if lift2 is not None or len(meds) != 1:
                return False
            lift2 = (elem, meds[0])
    if lift1 is None or lift2 is None:
        return False
    (ek, med_k), (el, med_l) = lift1, lift2
    top_square = Square(el.alpha, ek.alpha, med_l, med_k)
    return PULLBACK in classify_square(top_square, ctx)


FIBRATION_CHECKS = {
    "mof_lifting": check_mof_lifting,
    "rmof_lifting": check_rmof_lifting,
    "bcc1": check_bcc1,
    "bcc2": check_bcc2,
    "pb_splitting": check_pb_splitting,
}


def check_fibration_instance(kind: str, instance: dict, ctx: CategoryCtx) -> bool:
    try:
        checker = FIBRATION_CHECKS[kind]
    except KeyError:
        raise CatrewError(f"unknown fibration check {kind!r}") from None
    return checker(instance, ctx)


def _m_extension(rng: random.Random, g: FinGraph, ctx: CategoryCtx,
                 extra: tuple[int, int] = (1, 2)) -> GraphMorphism:
    return generate_morphism_from(rng, g, ctx, m_class=True, extra=extra)


def generate_fibration_instance(kind: str, seed: int,
                                ctx: CategoryCtx) -> Optional[dict]:
    """A premise instance for the named check, or None when the draw fails."""
    rng = random.Random((kind, seed, ctx.kind).__repr__())
    if kind == "mof_lifting":
        a = generate_graph(rng, (2, 1), ctx)
        f = generate_morphism_from(rng, a, ctx, extra=(1, 1))
        beta = _m_extension(rng, f.cod, ctx, extra=(1, 1))
        beta2 = _m_extension(rng, beta.cod, ctx, extra=(1, 1))
        elems = multi_ipc(f, compose(beta2, beta), ctx, cap=200)
        if not elems:
            return None
        return {"f": f, "beta": beta, "beta2": beta2,
                "target": elems[rng.randrange(len(elems))]}
    if kind == "rmof_lifting":
        a = generate_graph(rng, (2, 1), ctx)
        f = generate_morphism_from(rng, a, ctx, extra=(1, 1))
        b = _m_extension(rng, f.cod, ctx, extra=(1, 1))
        n_full, _, _ = fpc(f, b, ctx)
        mids = [s for s in m_subobjects(n_full.cod, ctx)
                if set(n_full.vmap.values()) <= s.dom.vertices
                and set(n_full.emap.values()) <= s.dom.edge_ids]
        a2 = mids[rng.randrange(len(mids))]
        a1 = GraphMorphism(a, a2.dom, dict(n_full.vmap), dict(n_full.emap))
        if not ctx.is_m(a1):
            return None
        return {"f": f, "a1": a1, "a2": a2, "b": b}
    if kind in ("bcc1", "bcc2"):
        return _generate_bcc(kind, rng, ctx)
    if kind == "pb_splitting":
        d = generate_graph(rng, (3, 2), ctx, min_vertices=1)
        subs = m_subobjects(d, ctx)
        h1 = subs[rng.randrange(len(subs))]
        h2 = subs[rng.randrange(len(subs))]
        span, _ = pullback(Cospan(h1, h2), ctx)
        bp = span.apex
        g1 = mediansub = span.left
        g2 = span.right
        if not (ctx.is_m(g1) and ctx.is_m(g2)):
            return None
        bsubs = m_subobjects(bp, ctx)
        beta = bsubs[rng.randrange(len(bsubs))]
        a = generate_graph(rng, (2, 0), ctx)
        candidates = enumerate_morphisms(a, beta.dom, ctx)
        if not candidates:
            return None
        f = candidates[rng.randrange(len(candidates))]
        elems = multi_ipc(f, compose(h1, compose(g1, beta)), ctx, cap=200)
        if not elems:
            return None
        return {"f": f, "beta": beta, "g1": g1, "g2": g2, "h1": h1, "h2": h2,
                "target": elems[rng.randrange(len(elems))]}
    raise CatrewError(f"unknown fibration check {kind!r}")


def _generate_bcc(kind: str, rng: random.Random, ctx: CategoryCtx) -> Optional[dict]:
    c = generate_graph(rng, (2, 1), ctx)
    i = generate_morphism_from(rng, c, ctx, extra=(1, 1))
    m_c = _m_extension(rng, c, ctx, extra=(1, 1))
    cos_front, front = pushout(Span(m_c, i), ctx)
    i_prime, m_d = cos_front.left, cos_front.right
    d = i.cod
    subs = m_subobjects(d, ctx)
    h = subs[rng.randrange(len(subs))]
    b = h.dom
    m_b, h_prime, right = fpc(h, m_d, ctx)
    span, top_pb = pullback(Cospan(i, h), ctx)
    g, f = span.left, span.right
    a = span.apex
    m_a, g_prime, left = fpc(g, m_c, ctx)
    fps = [fp for fp in morphisms_with_equations(
               m_a.cod, m_b.cod,
               pinned=[(m_a, compose(m_b, f))],
               post=[(h_prime, compose(i_prime, g_prime))])
           if is_pullback_square(Square(f, m_a, m_b, fp), ctx)]
    if not fps:
        return None
    f_prime = fps[rng.randrange(len(fps))]
    back = Square(f, m_a, m_b, f_prime)
    if kind == "bcc1":
        return {"back": back}
    # bcc2: rebuild the premise with front/back pushouts and right FPC, then
    # ask for the left square; reuse the same cube when the back is a pushout
    if PUSHOUT not in classify_square(back, ctx):
        return None
    return {"left": left}


# ---------------------------------------------------------------------------
# pasting-lemma suite
# ---------------------------------------------------------------------------

def check_pasting_instance(kind: str, seed: int, ctx: CategoryCtx) -> Optional[bool]:
    """One seeded instance of a double-square lemma; None when the draw fails."""
    rng = random.Random((kind, seed, ctx.kind).__repr__())
    k = generate_graph(rng, (2, 1), ctx)
    if kind == "po_po":
        f = generate_morphism_from(rng, k, ctx)
        alpha = generate_morphism_from(rng, k, ctx)
        _, sq1 = pushout(Span(alpha, f), ctx)
        alpha2 = generate_morphism_from(rng, sq1.left.cod, ctx)
        _, sq2 = pushout(Span(alpha2, sq1.bottom), ctx)
        if PUSHOUT not in classify_square(sq1.vpaste(sq2), ctx):
            return False
        # decomposition: the comparison square under an outer pushout is one
        _, outer = pushout(Span(compose(alpha2, alpha), f), ctx)
        u = mediating_out_of_pushout(
            sq1, Cospan(compose(outer.bottom, alpha2), outer.right))
        lower = Square(sq1.bottom, alpha2, u, outer.bottom)
        return PUSHOUT in classify_square(lower, ctx)
    if kind == "pb_pb":
        f1 = generate_morphism_from(rng, k, ctx)
        f2 = generate_morphism_from(rng, k, ctx)
        cos, _ = pushout(Span(f1, f2), ctx)
        _, sq2 = pullback(Cospan(cos.left, cos.right), ctx)
        subs = m_subobjects(sq2.top.cod, ctx)
        y = subs[rng.randrange(len(subs))]
        if PULLBACK not in classify_square(
                pullback(Cospan(sq2.top, y), ctx)[1].vpaste(sq2), ctx):
            return False
        # decomposition: the comparison square over an outer pullback is one
        span_o, _ = pullback(Cospan(cos.left, compose(cos.right, y)), ctx)
        u = mediating_into_pullback(
            sq2, Span(span_o.left, compose(y, span_o.right)))
        upper = Square(span_o.right, u, y, sq2.top)
        return PULLBACK in classify_square(upper, ctx)
    if kind == "fpc_vertical":
        f = generate_morphism_from(rng, k, ctx)
        m = _m_extension(rng, f.cod, ctx)
        n, g, sq1 = fpc(f, m, ctx)
        m2 = _m_extension(rng, g.cod, ctx)
        n2, g2, sq2 = fpc(g, m2, ctx)
        return FPC in classify_square(sq1.vpaste(sq2), ctx)
    if kind == "fpc_horizontal":
        f = generate_morphism_from(rng, k, ctx)
        m = _m_extension(rng, f.cod, ctx)
        n, g, sq1 = fpc(f, m, ctx)
        # a square to the left of sq1 over its source M-morphism
        subs = m_subobjects(k, ctx)
        f2 = subs[rng.randrange(len(subs))]
        n2, g2, sq2 = fpc(f2, n, ctx)
        return FPC in classify_square(sq2.hpaste(sq1), ctx)
    if kind == "po_pb_decomp":
        f = generate_morphism_from(rng, k, ctx)
        alpha = _m_extension(rng, k, ctx)
        _, sq = pushout(Span(alpha, f), ctx)
        beta_full = sq.right
        mids = [s for s in m_subobjects(beta_full.cod, ctx)
                if set(beta_full.vmap.values()) <= s.dom.vertices
                and set(beta_full.emap.values()) <= s.dom.edge_ids]
        beta2 = mids[rng.randrange(len(mids))]
        beta1 = GraphMorphism(beta_full.dom, beta2.dom,
                              dict(beta_full.vmap), dict(beta_full.emap))
        if not ctx.is_m(beta1):
            return None
        span, pb_sq = pullback(Cospan(sq.bottom, beta2), ctx)
        a_mid, f_mid = span.left, span.right
        alpha1 = mediating_into_pullback(pb_sq, Span(alpha, compose(beta1, f)))
        lower = Square(f_mid, a_mid, beta2, sq.bottom)
        upper = Square(f, alpha1, beta1, f_mid)
        return (PUSHOUT in classify_square(lower, ctx)
                and PUSHOUT in classify_square(upper, ctx))
    raise CatrewError(f"unknown pasting check {kind!r}")


PASTING_KINDS = ("po_po", "pb_pb", "fpc_vertical", "fpc_horizontal",
                 "po_pb_decomp")
FIBRATION_KINDS = tuple(FIBRATION_CHECKS)
