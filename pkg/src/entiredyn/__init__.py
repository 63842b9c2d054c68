"""Escape-time dynamics of transcendental entire functions and their commuting partners."""

from .dsl import ExprFunction, ParseError, evaluate, make_symmetric_from_odd, parse, to_source, tokenize
from .dynamics import (
    AffineMap,
    ClassifierConfig,
    CommutingPair,
    OrbitRecord,
    PointClass,
    classify_orbit,
    classify_point,
    iterate_orbit,
    partner_orbit_via_identity,
)
from .raster import GridSpec, classify_grid, compare_rasters, extract_boundary

__all__ = [
    "AffineMap",
    "ClassifierConfig",
    "CommutingPair",
    "ExprFunction",
    "GridSpec",
    "OrbitRecord",
    "ParseError",
    "PointClass",
    "classify_grid",
    "classify_orbit",
    "classify_point",
    "compare_rasters",
    "evaluate",
    "extract_boundary",
    "iterate_orbit",
    "make_symmetric_from_odd",
    "parse",
    "partner_orbit_via_identity",
    "to_source",
    "tokenize",
]
