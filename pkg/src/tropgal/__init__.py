"""Exact computations with finite group actions on tropical curves.

Curves are metric multigraphs with rational edge lengths and infinite leaf
edges.  The package builds quotients by finite automorphism groups, decides
whether a covering is Galois and verifies the correspondence between
subgroups and intermediate coverings.
"""

from __future__ import annotations

from .curve import Curve, Edge, Point, make_curve, validate_model
from . import errors
from .galois import (
    classify_covering,
    galois_correspondence,
    intermediate_analysis,
    invariance_group,
    is_galois_action,
    prenormal_check,
    ump_check,
)
from .group import ActionGroup, Automorphism, Subgroup, generate_group, subgroups
from .lengths import INF, as_length, format_length, parse_length
from .morphism import MorphismRep, check_finite_morphism, check_harmonic, compose, factor_through
from .quotient import quotient
from .refine import canonical_model, loopless_refinement, refine_at, subdivide

__version__ = "0.1.0"

__all__ = [
    "INF", "ActionGroup", "Automorphism", "Curve", "Edge", "MorphismRep", "Point", "Subgroup",
    "as_length", "canonical_model", "check_finite_morphism", "check_harmonic",
    "classify_covering", "compose", "errors", "factor_through", "format_length",
    "galois_correspondence", "generate_group", "intermediate_analysis", "invariance_group",
    "is_galois_action", "loopless_refinement", "make_curve", "parse_length", "prenormal_check",
    "quotient", "refine_at", "subdivide", "subgroups", "ump_check", "validate_model",
]
