"""Two-period climate analysis: design, file formats, surrogate data, figures."""

from .design import TwoPeriodDesign, build_two_period_design, design_from_covariates, equally_spaced_times
from .stackfile import convert_csv_grids, read_covariates, read_stack, write_covariates, write_stack
from .surrogate import SurrogatePaths, make_surrogate
from .render import render

__all__ = [
    "TwoPeriodDesign", "build_two_period_design", "design_from_covariates", "equally_spaced_times",
    "convert_csv_grids", "read_covariates", "read_stack", "write_covariates", "write_stack",
    "SurrogatePaths", "make_surrogate", "render",
]
