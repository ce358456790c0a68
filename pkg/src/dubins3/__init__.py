"""Shortest Dubins paths through three points with a free middle heading."""

from .dubins import DubinsPath, Pose, batch_lengths, endpoint, pair_length, sample_path, solve_pair
from .geometry import (
    Circle,
    GeometryError,
    InfeasibleTangent,
    Line,
    Point,
    common_tangent,
    invert_circle,
    invert_line,
    invert_point,
)
from .three_point import (
    PathClass,
    SolveOptions,
    ThreePointInstance,
    ThreePointSolution,
    approx_heading,
    discretize_heading,
    enumerate_classes,
    error_bound,
    iterate_heading,
    residuals,
    solve_approx,
    solve_three_point,
)
from .tour import RefineConfig, Tour, construct_initial_tour, delete_reinsert, post_process, refine_headings

__version__ = "0.1.0"

__all__ = [
    "DubinsPath",
    "Pose",
    "batch_lengths",
    "endpoint",
    "pair_length",
    "sample_path",
    "solve_pair",
    "Circle",
    "GeometryError",
    "InfeasibleTangent",
    "Line",
    "Point",
    "common_tangent",
    "invert_circle",
    "invert_line",
    "invert_point",
    "PathClass",
    "SolveOptions",
    "ThreePointInstance",
    "ThreePointSolution",
    "approx_heading",
    "discretize_heading",
    "enumerate_classes",
    "error_bound",
    "iterate_heading",
    "residuals",
    "solve_approx",
    "solve_three_point",
    "RefineConfig",
    "Tour",
    "construct_initial_tour",
    "delete_reinsert",
    "post_process",
    "refine_headings",
]
