"""Categorical rewriting over directed multigraphs and directed simple graphs."""

from catrew.core import (
    CategoryCtx,
    CatrewError,
    FinGraph,
    GraphMorphism,
    GRAPH,
    SGRAPH,
    IsoCertificate,
    canonical_form,
    classify,
    compose,
    enumerate_morphisms,
    find_isomorphism,
    identity,
)

__all__ = [
    "CategoryCtx",
    "CatrewError",
    "FinGraph",
    "GraphMorphism",
    "GRAPH",
    "SGRAPH",
    "IsoCertificate",
    "canonical_form",
    "classify",
    "compose",
    "enumerate_morphisms",
    "find_isomorphism",
    "identity",
]
