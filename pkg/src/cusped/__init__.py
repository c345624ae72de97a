"""Finite truncations of cusped Cayley graphs and combinatorial horoballs,
with measurements of their coarse-geometric constants."""

__version__ = "0.1.0"

from .cusped_graph import CayleyVertex, CuspedTruncation, CuspVertex, build_cusped, cusped_distance, extract_geodesic
from .distortion import analyze_horoball, check_dilation, cross_check_equivalence, measure_distortion
from .errors import (
    ConfigurationError,
    CuspedError,
    DependencyError,
    ExportError,
    InputError,
    InsufficientDepthError,
    InsufficientTruncationError,
    InvariantViolation,
    ResourceError,
)
from .export import export_graph
from .extension import cusp_extend, make_pair_map, measure_extension
from .groups import IDENTITY, GroupElement, GroupPair, make_group
from .horoball import HoroballTruncation, HoroVertex, build_horoball, horoball_distance
from .hyperbolicity import four_point_delta, gromov_product, thin_triangle_delta, visual_estimate
from .perfection import center_criterion, equilateral_scan

__all__ = [
    "CayleyVertex", "ConfigurationError", "CuspVertex", "CuspedError", "CuspedTruncation", "DependencyError",
    "ExportError", "GroupElement", "GroupPair", "HoroVertex", "HoroballTruncation", "IDENTITY", "InputError",
    "InsufficientDepthError", "InsufficientTruncationError", "InvariantViolation", "ResourceError",
    "analyze_horoball", "build_cusped", "build_horoball", "center_criterion", "check_dilation",
    "cross_check_equivalence", "cusp_extend", "cusped_distance", "equilateral_scan", "export_graph",
    "extract_geodesic", "four_point_delta", "gromov_product", "horoball_distance", "make_group",
    "make_pair_map", "measure_distortion", "measure_extension", "thin_triangle_delta", "visual_estimate",
]
