"""Search-space census, skeleton enumeration, constructions and baseline activations."""

from evoact.analysis.baselines import BASELINES, baseline, baseline_names, wrap_scaled
from evoact.analysis.census import (
    REFERENCE_ARRANGEMENTS,
    CensusRow,
    SpaceCensus,
    count_space,
    load_arrangements,
    placement_count,
)
from evoact.analysis.constructions import (
    Construction,
    PiecewiseSpec,
    SeriesPiece,
    build_indicator,
    compile_piecewise,
)
from evoact.analysis.shapes import ShapeReport, arrangement_formula, enumerate_shapes

__all__ = [
    "BASELINES",
    "CensusRow",
    "Construction",
    "PiecewiseSpec",
    "REFERENCE_ARRANGEMENTS",
    "SeriesPiece",
    "ShapeReport",
    "SpaceCensus",
    "arrangement_formula",
    "baseline",
    "baseline_names",
    "build_indicator",
    "compile_piecewise",
    "count_space",
    "enumerate_shapes",
    "load_arrangements",
    "placement_count",
    "wrap_scaled",
]
