"""Complex-valued sparse recovery with a single-snapshot beamforming harness."""

from .greedy import cosamp, omp
from .lars import KnotPath, PathStallError, next_knot, weighted_lasso_path
from .linalg import hermitian_inner, least_squares, normalize_columns
from .model import (
    PRESETS,
    Scenario,
    SteeringGrid,
    build_grid,
    generate_snapshot,
    load_scenario,
    mbc,
    preset,
    save_scenario,
    steering_vector,
)
from .saen import SaenTrace, StageFailure, adaptive_weights, aen_variant, saen
from .wen import (
    DEFAULT_ALPHA_GRID,
    WenSolution,
    augment,
    lambda_max,
    make_alpha_grid,
    pathwise_wen,
    wen_path,
)

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "DEFAULT_ALPHA_GRID",
    "KnotPath",
    "PathStallError",
    "SaenTrace",
    "Scenario",
    "StageFailure",
    "SteeringGrid",
    "WenSolution",
    "adaptive_weights",
    "aen_variant",
    "augment",
    "build_grid",
    "cosamp",
    "generate_snapshot",
    "hermitian_inner",
    "lambda_max",
    "least_squares",
    "load_scenario",
    "make_alpha_grid",
    "mbc",
    "next_knot",
    "normalize_columns",
    "omp",
    "pathwise_wen",
    "preset",
    "save_scenario",
    "saen",
    "steering_vector",
    "wen_path",
    "weighted_lasso_path",
]
