"""Numerical core: grids, per-cell GLM, multiplier bootstrap, CoPE sets."""

from .grid import (
    ContourSet,
    FieldStack,
    GridGeometry,
    RegionMask,
    ScalarField,
    boundary_cells,
    excursion_set,
    extract_boundary,
    interpolate_on_contour,
)
from .glm import DesignSpec, FitResult, build_design, fit, standardized_deviation
from .bootstrap import (
    SupSample,
    Threshold,
    bootstrap_realization,
    sample_covariance,
    sup_distribution,
    sup_distribution_blocked,
    threshold,
)
from .cope import CopeResult, contour_band, cope_sets, plugin_region, verify_contour_inclusion, verify_inclusion

__all__ = [
    "ContourSet", "FieldStack", "GridGeometry", "RegionMask", "ScalarField",
    "boundary_cells", "excursion_set", "extract_boundary", "interpolate_on_contour",
    "DesignSpec", "FitResult", "build_design", "fit", "standardized_deviation",
    "SupSample", "Threshold", "bootstrap_realization", "sample_covariance",
    "sup_distribution", "sup_distribution_blocked", "threshold",
    "CopeResult", "contour_band", "cope_sets", "plugin_region", "verify_contour_inclusion", "verify_inclusion",
]
