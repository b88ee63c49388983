"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 unsupported semantics, 3 empty
result set, 4 invariant or verification failure, 5 resource cap exceeded.
Results go to standard output (or --out); diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from catrew import io
from catrew.core import (
    GRAPH, SGRAPH, CategoryCtx, CatrewError, ResourceLimitError,
    find_isomorphism,
)
from catrew.composition import (
    VerificationError, compose_rules, enumerate_rule_matches,
)
from catrew.multi import fpa, fpc_factorize, multi_ipc, multi_sum
from catrew.rewriting import (
    Match, SemanticsTag, UnsupportedSemanticsError, apply, enumerate_matches,
    supported,
)
from catrew.universal import Square, classify_square, fpc
from catrew.verification import (
    FIBRATION_KINDS, PASTING_KINDS, TwoStepDerivation, analyze,
    associativity_check, check_fibration_instance, check_pasting_instance,
    generate_fibration_instance, mipc_equivalent, oracle_pushout_complements,
    synthesize,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSUPPORTED = 2
EXIT_EMPTY = 3
EXIT_FAILED = 4
EXIT_CAPPED = 5

RULES_FLAGS = {
    "generic": "generic",
    "linear": "linear",
    "in-linear": "input_linear",
    "out-linear": "output_linear",
    "semi-linear": "semi_linear",
}


def _ctx(args) -> CategoryCtx:
    return SGRAPH if args.category == "sgraph" else GRAPH


def _tag(args) -> SemanticsTag:
    return SemanticsTag(args.semantics, RULES_FLAGS[args.rules])


def _emit(args, payload) -> None:
    text = io.dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _add_common(parser, semantics=False):
    parser.add_argument("--category", choices=["graph", "sgraph"],
                        default="graph")
    parser.add_argument("--out")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-vertices", type=int, default=4)
    parser.add_argument("--max-edges", type=int, default=5)
    parser.add_argument("--force", action="store_true")
    if semantics:
        parser.add_argument("--semantics", choices=["dpo", "sqpo"],
                            default="dpo")
        parser.add_argument("--rules", choices=sorted(RULES_FLAGS),
                            default="generic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catrew",
        description="categorical rewriting over directed (simple) graphs")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("matches", help="enumerate admissible matches")
    _add_common(p, semantics=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--host", required=True)

    p = sub.add_parser("apply", help="run direct derivations")
    _add_common(p, semantics=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--host", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--match", type=int, default=None)
    g.add_argument("--all", action="store_true")

    p = sub.add_parser("compose", help="compose two rules (r1 first)")
    _add_common(p, semantics=True)
    p.add_argument("rule2")
    p.add_argument("rule1")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--match", type=int, default=None)

    p = sub.add_parser("multisum", help="multi-sum of two graphs")
    _add_common(p)
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("mipc", help="multi-initial pushout complements")
    _add_common(p)
    p.add_argument("f")
    p.add_argument("beta")

    p = sub.add_parser("fpa", help="FPC pushout augmentations of a pushout square")
    _add_common(p)
    p.add_argument("square")

    p = sub.add_parser("fpc", help="final pullback complement of f then m")
    _add_common(p)
    p.add_argument("f")
    p.add_argument("m")

    p = sub.add_parser("fpc-factorize",
                       help="auto-augmented/inert factorization of an FPC square")
    _add_common(p)
    p.add_argument("square")

    p = sub.add_parser("verify-square", help="classify a commuting square")
    _add_common(p)
    p.add_argument("square")

    p = sub.add_parser("concurrency", help="synthesize or analyze derivations")
    _add_common(p, semantics=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--synthesize", nargs=2, metavar=("D1", "D2"))
    g.add_argument("--analyze", metavar="COMPOSITE")

    p = sub.add_parser("assoc", help="associativity report for a rule triple")
    _add_common(p, semantics=True)
    p.add_argument("rule3")
    p.add_argument("rule2")
    p.add_argument("rule1")
    p.add_argument("--cap", type=int, default=20000)

    p = sub.add_parser("selftest", help="run the built-in verification suites")
    _add_common(p)
    p.add_argument("--suite", choices=["pasting", "fibration", "oracle"],
                   default=None)
    p.add_argument("--count", type=int, default=20)

    p = sub.add_parser("export-dot", help="export a graph or derivation to DOT")
    _add_common(p)
    p.add_argument("file")
    p.add_argument("--shape", choices=["graph", "derivation"], default="graph")
    return parser


def _refuse_or_warn(ctx, tag, operation, force) -> Optional[int]:
    axiom = supported(ctx, tag, operation)
    if axiom is None:
        return None
    if operation == "compose" and not force:
        print(f"error: category {ctx.kind!r} does not support compositional "
              f"{tag.rule_class} {tag.base} semantics (axiom {axiom} fails); "
              f"use --force to override", file=sys.stderr)
        return EXIT_UNSUPPORTED
    return None


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    try:
        return _dispatch(args)
    except UnsupportedSemanticsError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ResourceLimitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CAPPED
    except (io.LoadError, CatrewError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILED


def _dispatch(args) -> int:
    ctx = _ctx(args)
    if args.verb == "matches":
        tag = _tag(args)
        rule = io.load(args.rule, "rule", ctx)
        host = io.load(args.host, "graph", ctx)
        ms = enumerate_matches(rule, host, tag, ctx, args.force)
        if not ms:
            print("no admissible matches", file=sys.stderr)
            return EXIT_EMPTY
        _emit(args, [io.match_to_json(m) for m in ms])
        return EXIT_OK

    if args.verb == "apply":
        tag = _tag(args)
        code = _refuse_or_warn(ctx, tag, "apply", args.force)
        if code is not None:
            return code
        if supported(ctx, tag, "compose") is not None:
            _warn("this semantics is not compositional here; single "
                  "applications are still well defined")
        rule = io.load(args.rule, "rule", ctx)
        host = io.load(args.host, "graph", ctx)
        ms = enumerate_matches(rule, host, tag, ctx, args.force)
        if not ms:
            print("no admissible matches", file=sys.stderr)
            return EXIT_EMPTY
        if args.all or args.match is None:
            chosen = ms if args.all else ms[:1]
        else:
            if not 0 <= args.match < len(ms):
                print(f"error: match index out of range 0..{len(ms)-1}",
                      file=sys.stderr)
                return EXIT_USAGE
            chosen = [ms[args.match]]
        ds = [apply(rule, m, tag, ctx, args.force) for m in chosen]
        payload = [io.derivation_to_json(d) for d in ds]
        _emit(args, payload if len(payload) > 1 else payload[0])
        return EXIT_OK

    if args.verb == "compose":
        tag = _tag(args)
        code = _refuse_or_warn(ctx, tag, "compose", args.force)
        if code is not None:
            return code
        r2 = io.load(args.rule2, "rule", ctx)
        r1 = io.load(args.rule1, "rule", ctx)
        matches = enumerate_rule_matches(r2, r1, tag, ctx, args.force)
        if not matches:
            print("no admissible rule matches", file=sys.stderr)
            return EXIT_EMPTY
        if args.list:
            _emit(args, [_rule_match_summary(mu) for mu in matches])
            return EXIT_OK
        idx = args.match if args.match is not None else 0
        if not 0 <= idx < len(matches):
            print(f"error: match index out of range 0..{len(matches)-1}",
                  file=sys.stderr)
            return EXIT_USAGE
        witness = compose_rules(r2, matches[idx], r1, tag, ctx, args.force)
        _emit(args, io.witness_to_json(witness))
        return EXIT_OK

    if args.verb == "multisum":
        a = io.load(args.a, "graph", ctx)
        b = io.load(args.b, "graph", ctx)
        elems = multi_sum(a, b, ctx, cap=100000)
        _emit(args, [io.multisum_to_json(el) for el in elems])
        return EXIT_OK if elems else EXIT_EMPTY

    if args.verb == "mipc":
        f = io.load(args.f, "morphism", ctx)
        beta = io.load(args.beta, "morphism", ctx)
        elems = multi_ipc(f, beta, ctx)
        if not elems:
            print("empty complement family", file=sys.stderr)
            return EXIT_EMPTY
        _emit(args, [io.mipc_to_json(el) for el in elems])
        return EXIT_OK

    if args.verb == "fpa":
        sq = io.load(args.square, "square", ctx)
        elems = fpa(sq, ctx, cap=100000)
        if not elems:
            print("empty augmentation family", file=sys.stderr)
            return EXIT_EMPTY
        _emit(args, [io.fpa_to_json(el) for el in elems])
        return EXIT_OK

    if args.verb == "fpc":
        f = io.load(args.f, "morphism", ctx)
        m = io.load(args.m, "morphism", ctx)
        _, _, sq = fpc(f, m, ctx)
        _emit(args, io.square_to_json(sq))
        return EXIT_OK

    if args.verb == "fpc-factorize":
        sq = io.load(args.square, "square", ctx)
        upper, lower = fpc_factorize(sq, ctx)
        _emit(args, {"auto_augmented": io.square_to_json(upper),
                     "inert": io.square_to_json(lower)})
        return EXIT_OK

    if args.verb == "verify-square":
        sq = io.load(args.square, "square", ctx)
        kinds = classify_square(sq, ctx)
        _emit(args, {"kinds": sorted(kinds),
                     "declared": sorted(sq.kinds),
                     "declared_hold": set(sq.kinds) <= set(kinds)})
        return EXIT_OK if set(sq.kinds) <= set(kinds) else EXIT_FAILED

    if args.verb == "concurrency":
        tag = _tag(args)
        code = _refuse_or_warn(ctx, tag, "compose", args.force)
        if code is not None:
            return code
        if args.synthesize:
            d1 = io.load(args.synthesize[0], "derivation", ctx)
            d2 = io.load(args.synthesize[1], "derivation", ctx)
            sr = synthesize(TwoStepDerivation(d1, d2), tag, ctx, args.force)
            _emit(args, {"witness": io.witness_to_json(sr.composite),
                         "derivation": io.derivation_to_json(sr.derivation)})
            return EXIT_OK
        with open(args.analyze, "r", encoding="utf-8") as fh:
            blob = json.load(fh)
        witness = io.witness_from_json(blob["witness"], ctx)
        derivation = io.derivation_from_json(blob["derivation"], ctx)
        ts = analyze(witness, derivation, ctx, args.force)
        _emit(args, {"first": io.derivation_to_json(ts.first),
                     "second": io.derivation_to_json(ts.second)})
        return EXIT_OK

    if args.verb == "assoc":
        tag = _tag(args)
        code = _refuse_or_warn(ctx, tag, "compose", args.force)
        if code is not None:
            return code
        r3 = io.load(args.rule3, "rule", ctx)
        r2 = io.load(args.rule2, "rule", ctx)
        r1 = io.load(args.rule1, "rule", ctx)
        rep = associativity_check(r3, r2, r1, tag, ctx, cap=args.cap,
                                  force=args.force)
        payload = {
            "complete": rep.complete,
            "equal": rep.equal,
            "left_total": sum(rep.left_classes.values()),
            "right_total": sum(rep.right_classes.values()),
            "left_class_count": len(rep.left_classes),
            "right_class_count": len(rep.right_classes),
        }
        _emit(args, payload)
        if not rep.complete:
            return EXIT_CAPPED
        return EXIT_OK if rep.equal else EXIT_FAILED

    if args.verb == "selftest":
        return _selftest(args, ctx)

    if args.verb == "export-dot":
        value = io.load(args.file, args.shape, ctx)
        text = io.export_dot(value)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    return EXIT_USAGE


def _rule_match_summary(mu) -> dict:
    from catrew.composition import DpoRuleMatch
    base = {"overlap": io.multisum_to_json(mu.multisum)}
    if isinstance(mu, DpoRuleMatch):
        base["complement_input"] = io.mipc_to_json(mu.mipc2)
        base["complement_output"] = io.mipc_to_json(mu.mipc1)
    else:
        base["complement_output"] = io.mipc_to_json(mu.mipc1)
        base["augmentation"] = io.fpa_to_json(mu.fpa_elem)
    return base


def _selftest(args, ctx) -> int:
    suites = [args.suite] if args.suite else ["pasting", "fibration", "oracle"]
    report = {}
    healthy = True
    for suite in suites:
        entry = {}
        if suite == "pasting":
            for kind in PASTING_KINDS:
                passed = failed = skipped = 0
                seed = args.seed
                while passed + failed < args.count and seed < args.seed + 12 * args.count:
                    res = check_pasting_instance(kind, seed, ctx)
                    seed += 1
                    if res is None:
                        skipped += 1
                    elif res:
                        passed += 1
                    else:
                        failed += 1
                entry[kind] = {"passed": passed, "failed": failed,
                               "skipped": skipped}
                healthy &= failed == 0
        elif suite == "fibration":
            for kind in FIBRATION_KINDS:
                if kind in ("bcc1", "bcc2") and ctx.is_simple:
                    continue
                passed = failed = skipped = 0
                seed = args.seed
                while passed + failed < args.count and seed < args.seed + 12 * args.count:
                    inst = generate_fibration_instance(kind, seed, ctx)
                    seed += 1
                    if inst is None:
                        skipped += 1
                    elif check_fibration_instance(kind, inst, ctx):
                        passed += 1
                    else:
                        failed += 1
                entry[kind] = {"passed": passed, "failed": failed,
                               "skipped": skipped}
                healthy &= failed == 0
        elif suite == "oracle":
            from catrew.verification import (
                generate_graph, generate_morphism_from, _m_extension,
                families_equal)
            import random as _random
            rng = _random.Random(args.seed)
            passed = failed = 0
            for _ in range(max(4, args.count // 4)):
                a = generate_graph(rng, (2, 1), ctx)
                f = generate_morphism_from(rng, a, ctx, extra=(1, 1))
                beta = _m_extension(rng, f.cod, ctx, extra=(1, 1))
                fast = multi_ipc(f, beta, ctx)
                max_v = max([len(e.alpha.cod.vertices) for e in fast] or [0])
                max_e = max([len(e.alpha.cod.edges) for e in fast] or [0])
                bound = (min(4, max(max_v, len(beta.cod.vertices))),
                         min(5, max(max_e, len(beta.cod.edges) + 1)))
                slow = oracle_pushout_complements(f, beta, bound, ctx)
                if families_equal(fast, slow, mipc_equivalent):
                    passed += 1
                else:
                    failed += 1
            entry["pushout_complements"] = {"passed": passed, "failed": failed}
            healthy &= failed == 0
        report[suite] = entry
    report["healthy"] = healthy
    _emit(args, report)
    return EXIT_OK if healthy else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
