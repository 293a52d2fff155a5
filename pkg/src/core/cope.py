"""CoPE sets: threshold the standardized deviation at ±a, band, inclusion checks."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from src.core.bootstrap import SupSample, Threshold
from src.core.glm import FitResult
from src.core.grid import ContourSet, RegionMask, ScalarField, boundary_cells, extract_boundary, inner_boundary
from src.errors import GeometryError, InvalidFieldError
from src.models.reports import InclusionReport, Provenance

_EIGHT = ndimage.generate_binary_structure(2, 2)


@dataclass(frozen=True, eq=False)
class CopeResult:
    """Nested masks Â⁺ ⊆ Â ⊆ Â⁻, the contour band, and how they were obtained."""

    threshold: Threshold
    upper: RegionMask
    point_estimate: RegionMask
    lower: RegionMask
    band: RegionMask
    deviation: ScalarField
    level_c: float = float("nan")
    sup_sample: Optional[SupSample] = None
    provenance: Optional[Provenance] = None

    @property
    def geometry(self):
        return self.deviation.geometry


def cope_sets(
    dev: ScalarField,
    a: Threshold,
    level_c: float = float("nan"),
    sup_sample: Optional[SupSample] = None,
    provenance: Optional[Provenance] = None,
) -> CopeResult:
    """
    Â⁺ = {dev ≥ a}, Â = {dev ≥ 0}, Â⁻ = {dev ≥ -a} on the masked-in cells.

    ±∞ deviations (cells below the σ̂ floor) are legal and land on the side of
    their sign; NaN on a masked-in cell is not.
    """
    valid = dev.valid
    v = dev.values
    if np.isnan(v[valid]).any():
        raise InvalidFieldError("standardized deviation has NaN on masked-in cells")

    g = dev.geometry
    with np.errstate(invalid="ignore"):
        upper = RegionMask(g, (v >= a.a) & valid)
        point = RegionMask(g, (v >= 0.0) & valid)
        lower = RegionMask(g, (v >= -a.a) & valid)

    between = (lower - upper).inside
    closure = ndimage.binary_dilation(between, structure=_EIGHT) & lower.inside
    band = RegionMask(g, closure) | inner_boundary(point, valid)

    return CopeResult(
        threshold=a,
        upper=upper,
        point_estimate=point,
        lower=lower,
        band=band,
        deviation=dev,
        level_c=level_c,
        sup_sample=sup_sample,
        provenance=provenance,
    )


def contour_band(result: CopeResult) -> RegionMask:
    """Grid closure of Â⁻ \\ Â⁺ (plus the boundary cells of Â), which must hold ∂A."""
    return result.band


def verify_inclusion(result: CopeResult, truth: RegionMask) -> InclusionReport:
    """upper_ok ⇔ Â⁺ ⊆ truth; lower_ok ⇔ truth ⊆ Â⁻ (over S)."""
    if truth.geometry != result.geometry:
        raise GeometryError("truth mask and CoPE sets live on different grids")
    valid = result.deviation.valid
    t = truth.inside & valid
    upper_ok = not bool((result.upper.inside & ~t).any())
    lower_ok = not bool((t & ~result.lower.inside).any())
    return InclusionReport(upper_ok=upper_ok, lower_ok=lower_ok)


def verify_contour_inclusion(result: CopeResult, truth_contour: ContourSet) -> bool:
    """Every point of the true contour has a flanking cell in the band."""
    if truth_contour.geometry != result.geometry:
        raise GeometryError("contour and CoPE sets live on different grids")
    if truth_contour.is_empty:
        return True
    in_band = result.band.inside.ravel()[truth_contour.cells]
    return bool(in_band.any(axis=1).all())


def plugin_region(
    fitres: FitResult,
    c: float,
    discretization: str = "interpolated",
    coef_index: int = 1,
) -> Union[ContourSet, RegionMask]:
    """Boundary of the estimated excursion set {b̂ ≥ c}, restricted to usable cells."""
    bhat = fitres.bhat[coef_index - 1].with_mask(fitres.usable)
    if discretization == "adjacent":
        return boundary_cells(bhat, c)
    return extract_boundary(bhat, c)
