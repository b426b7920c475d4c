"""Numerical evaluation of general Heun functions from their integral-series (path-sum) form."""

from .core import (
    CauchyData,
    HeunParameters,
    SegmentGrid,
    coeff_B1,
    coeff_B2,
    eval_X,
    local_series_seed,
    validate_params,
    weight_w,
)
from .errors import (
    DegenerateSingularity,
    HeunError,
    InvalidSeed,
    NearSingularDiagonal,
    PoleEvaluation,
    SegmentCrossesSingularity,
)
from .pathsum import (
    SolutionTable,
    evaluate_interval,
    evaluate_regular_from_origin,
    evaluate_segment,
    evaluate_uniform_points,
)

__version__ = "0.1.0"

__all__ = [
    "CauchyData",
    "DegenerateSingularity",
    "HeunError",
    "HeunParameters",
    "InvalidSeed",
    "NearSingularDiagonal",
    "PoleEvaluation",
    "SegmentCrossesSingularity",
    "SegmentGrid",
    "SolutionTable",
    "coeff_B1",
    "coeff_B2",
    "eval_X",
    "evaluate_interval",
    "evaluate_regular_from_origin",
    "evaluate_segment",
    "evaluate_uniform_points",
    "local_series_seed",
    "validate_params",
    "weight_w",
]
