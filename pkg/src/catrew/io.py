"""JSON persistence and DOT export.

JSON is the single persistence format; saved files are canonical (sorted
keys, two-space indent) so that save(load(x)) is byte-identical.  Witness
files embed full graphs rather than referencing them, keeping every file
self-contained.  DOT is export-only.
"""
from __future__ import annotations

import json
from typing import Any, Optional

from catrew.core import (
    CategoryCtx, CatrewError, FinGraph, GraphMorphism, GraphInvariantError,
)
from catrew.composition import CompositionWitness, DpoRuleMatch, SqpoRuleMatch
from catrew.multi import FpaElement, MipcElement, MultiSumElement
from catrew.rewriting import DirectDerivation, Match, Rule, SemanticsTag
from catrew.universal import Square


class LoadError(CatrewError):
    """A file failed to parse or violated a value invariant."""


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def graph_to_json(g: FinGraph) -> dict:
    return {
        "vertices": sorted(g.vertices),
        "edges": [{"id": e, "src": s, "tgt": t}
                  for e, (s, t) in sorted(g.edges.items())],
    }


def morphism_to_json(f: GraphMorphism, embed: bool = True) -> dict:
    out: dict[str, Any] = {
        "vmap": dict(sorted(f.vmap.items())),
        "emap": dict(sorted(f.emap.items())),
    }
    if embed:
        out["dom"] = graph_to_json(f.dom)
        out["cod"] = graph_to_json(f.cod)
    return out


def rule_to_json(r: Rule) -> dict:
    return {
        "output": graph_to_json(r.output),
        "context": graph_to_json(r.context),
        "input": graph_to_json(r.input),
        "o_map": morphism_to_json(r.output_morphism, embed=False),
        "i_map": morphism_to_json(r.input_morphism, embed=False),
    }


def square_to_json(sq: Square) -> dict:
    return {
        "top": morphism_to_json(sq.top),
        "left": morphism_to_json(sq.left),
        "right": morphism_to_json(sq.right),
        "bottom": morphism_to_json(sq.bottom),
        "kinds": sorted(sq.kinds),
    }


def match_to_json(m: Match) -> dict:
    out = {"morphism": morphism_to_json(m.morphism)}
    if m.mipc_choice is not None:
        out["complement"] = mipc_to_json(m.mipc_choice)
    return out


def mipc_to_json(el: MipcElement) -> dict:
    return {"alpha": morphism_to_json(el.alpha),
            "f_prime": morphism_to_json(el.f_prime),
            "square": square_to_json(el.po_square)}


def multisum_to_json(el: MultiSumElement) -> dict:
    return {"in_left": morphism_to_json(el.in_left),
            "in_right": morphism_to_json(el.in_right),
            "extension": morphism_to_json(el.extension)}


def fpa_to_json(el: FpaElement) -> dict:
    return {"gamma": morphism_to_json(el.gamma),
            "g": morphism_to_json(el.g),
            "e": morphism_to_json(el.e)}


def derivation_to_json(d: DirectDerivation) -> dict:
    return {
        "semantics": {"base": d.tag.base, "rules": d.tag.rule_class},
        "rule": rule_to_json(d.rule),
        "match": match_to_json(d.match),
        "square1": square_to_json(d.square1),
        "square2": square_to_json(d.square2),
        "comatch": morphism_to_json(d.comatch),
        "result": graph_to_json(d.result),
    }


def witness_to_json(w: CompositionWitness) -> dict:
    return {
        "semantics": {"base": w.tag.base, "rules": w.tag.rule_class},
        "composite": rule_to_json(w.composite),
        "squares": {name: {"square": square_to_json(sq), "kind": kind}
                    for name, (sq, kind) in sorted(w.squares.items())},
        "pullback_square": square_to_json(w.pullback_square),
    }


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def save(path: str, payload: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(payload))


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def graph_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> FinGraph:
    if not isinstance(data, dict) or "vertices" not in data:
        raise LoadError("graph object needs a 'vertices' list")
    edges = {}
    for entry in data.get("edges", []):
        try:
            eid, src, tgt = entry["id"], entry["src"], entry["tgt"]
        except (TypeError, KeyError):
            raise LoadError("each edge needs 'id', 'src' and 'tgt'") from None
        if eid in edges:
            raise LoadError(f"duplicate edge id {eid!r}")
        edges[eid] = (src, tgt)
    try:
        g = FinGraph(data["vertices"], edges)
    except GraphInvariantError as err:
        raise LoadError(str(err)) from None
    if ctx is not None:
        ctx.validate_graph(g)
    return g


def morphism_from_json(data: Any, ctx: Optional[CategoryCtx] = None,
                       dom: Optional[FinGraph] = None,
                       cod: Optional[FinGraph] = None) -> GraphMorphism:
    if not isinstance(data, dict):
        raise LoadError("morphism object must be a JSON object")
    if dom is None:
        dom = graph_from_json(data.get("dom"), ctx)
    if cod is None:
        cod = graph_from_json(data.get("cod"), ctx)
    try:
        return GraphMorphism(dom, cod, data.get("vmap", {}), data.get("emap", {}))
    except CatrewError as err:
        raise LoadError(str(err)) from None


def rule_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> Rule:
    for field in ("output", "context", "input", "o_map", "i_map"):
        if field not in data:
            raise LoadError(f"rule object needs the {field!r} field")
    out = graph_from_json(data["output"], ctx)
    k = graph_from_json(data["context"], ctx)
    inp = graph_from_json(data["input"], ctx)
    o_map = morphism_from_json(data["o_map"], ctx, dom=k, cod=out)
    i_map = morphism_from_json(data["i_map"], ctx, dom=k, cod=inp)
    return Rule(o_map, i_map)


def square_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> Square:
    try:
        sq = Square(
            morphism_from_json(data["top"], ctx),
            morphism_from_json(data["left"], ctx),
            morphism_from_json(data["right"], ctx),
            morphism_from_json(data["bottom"], ctx),
            frozenset(data.get("kinds", [])))
    except KeyError as err:
        raise LoadError(f"square object needs the {err.args[0]!r} field") from None
    except CatrewError as err:
        raise LoadError(str(err)) from None
    return sq


def match_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> Match:
    morphism = morphism_from_json(data["morphism"], ctx)
    choice = None
    if data.get("complement") is not None:
        sq = square_from_json(data["complement"]["square"], ctx)
        choice = MipcElement(sq.left, sq.bottom, sq)
    return Match(morphism, choice)


def derivation_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> DirectDerivation:
    tag = SemanticsTag(data["semantics"]["base"], data["semantics"]["rules"])
    rule = rule_from_json(data["rule"], ctx)
    square1 = square_from_json(data["square1"], ctx)
    square2 = square_from_json(data["square2"], ctx)
    comatch = morphism_from_json(data["comatch"], ctx)
    match = match_from_json(data["match"], ctx)
    try:
        return DirectDerivation(rule, tag, match, square1, square2, comatch)
    except CatrewError as err:
        raise LoadError(str(err)) from None


def witness_from_json(data: Any, ctx: Optional[CategoryCtx] = None) -> CompositionWitness:
    tag = SemanticsTag(data["semantics"]["base"], data["semantics"]["rules"])
    composite = rule_from_json(data["composite"], ctx)
    squares = {name: (square_from_json(entry["square"], ctx), entry["kind"])
               for name, entry in data["squares"].items()}
    pb = square_from_json(data["pullback_square"], ctx)
    return CompositionWitness(composite, tag, squares, pb)


_LOADERS = {
    "graph": graph_from_json,
    "morphism": morphism_from_json,
    "rule": rule_from_json,
    "square": square_from_json,
    "derivation": derivation_from_json,
    "witness": witness_from_json,
}


def load(path: str, expected: str, ctx: Optional[CategoryCtx] = None):
    """Parse and validate a value of the expected shape from a JSON file."""
    if expected not in _LOADERS:
        raise LoadError(f"unknown payload shape {expected!r}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise LoadError(f"no such file: {path}") from None
    except json.JSONDecodeError as err:
        raise LoadError(
            f"{path}: parse error at line {err.lineno}, column {err.colno}: "
            f"{err.msg}") from None
    return _LOADERS[expected](data, ctx)


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def _dot_node(prefix: str, v: str) -> str:
    return f'"{prefix}{v}"'


def _graph_body(g: FinGraph, prefix: str = "", indent: str = "  ") -> list[str]:
    lines = []
    for v in sorted(g.vertices):
        lines.append(f"{indent}{_dot_node(prefix, v)} [label=\"{v}\"];")
    for e, (s, t) in sorted(g.edges.items()):
        lines.append(f"{indent}{_dot_node(prefix, s)} -> {_dot_node(prefix, t)}"
                     f" [label=\"{e}\"];")
    return lines


def graph_to_dot(g: FinGraph, name: str = "G") -> str:
    lines = [f"digraph \"{name}\" {{"]
    lines.extend(_graph_body(g))
    lines.append("}")
    return "\n".join(lines) + "\n"


def derivation_to_dot(d: DirectDerivation) -> str:
    """Six clusters for the derivation diagram, with dashed map arrows."""
    named = [
        ("output", d.rule.output),
        ("context", d.rule.context),
        ("input", d.rule.input),
        ("result", d.result),
        ("intermediate", d.intermediate),
        ("host", d.host),
    ]
    lines = ["digraph derivation {", "  compound=true;"]
    for label, g in named:
        lines.append(f"  subgraph \"cluster_{label}\" {{")
        lines.append(f"    label=\"{label}\";")
        lines.extend(_graph_body(g, prefix=f"{label}.", indent="    "))
        lines.append("  }")
    arrows = [
        ("context", "output", d.rule.output_morphism),
        ("context", "input", d.rule.input_morphism),
        ("context", "intermediate", d.square1.left),
        ("input", "host", d.match.morphism),
        ("output", "result", d.comatch),
        ("intermediate", "host", d.square1.bottom),
        ("intermediate", "result", d.square2.bottom),
    ]
    for src, dst, mor in arrows:
        for v, w in sorted(mor.vmap.items()):
            lines.append(f"  {_dot_node(src + '.', v)} -> "
                         f"{_dot_node(dst + '.', w)} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(value: Any) -> str:
    if isinstance(value, FinGraph):
        return graph_to_dot(value)
    if isinstance(value, DirectDerivation):
        return derivation_to_dot(value)
    raise CatrewError(f"cannot export {type(value).__name__} to DOT")
