"""Fit the per-cell model and choose the region for the supremum."""

from loguru import logger

from src.config import settings
from src.core.cope import plugin_region
from src.core.glm import fit, standardized_deviation
from src.core.grid import ContourSet, RegionMask
from src.errors import EmptyBoundaryError
from src.graph.state import AnalysisState


def fit_node(state: AnalysisState) -> dict:
    """
    LangGraph node: least squares at every cell, σ̂, standardized deviation at c.

    Returns state updates for:
        - fit
        - deviation
        - current_stage
    """
    design = state["design"]
    logger.info("📈 Fit: n={} p={} c={}", design.n, design.spec.p, state["level"])

    result = fit(
        state["stack"],
        design.spec,
        variance_divisor=settings.VARIANCE_DIVISOR,
        sigma_floor_rel=settings.SIGMA_FLOOR_REL,
        sigma_policy=settings.SIGMA_POLICY,
    )
    dev = standardized_deviation(result, design.spec, state["level"])

    warnings = []
    if result.flagged.count:
        warnings.append(f"{result.flagged.count} cell(s) below the σ̂ floor take the ±∞ deviation limit")
    return {"fit": result, "deviation": dev, "warnings": warnings, "current_stage": "fit"}


def boundary_node(state: AnalysisState) -> dict:
    """
    LangGraph node: plug-in contour of b̂₁ at c, or all usable cells.

    Returns state updates for:
        - region
        - region_empty
        - current_stage
    """
    result = state["fit"]
    if state["boundary_mode"] == "domain":
        region = RegionMask(result.geometry, result.usable)
    else:
        region = plugin_region(
            result, state["level"], state.get("discretization", "interpolated"), state["design"].spec.coef_index
        )

    empty = region.is_empty if isinstance(region, ContourSet) else region.count == 0
    logger.info("🧭 Boundary: mode={} size={}", state["boundary_mode"], len(region) if isinstance(region, ContourSet) else region.count)
    return {"region": region, "region_empty": empty, "fallback_engaged": False, "current_stage": "boundary"}


def domain_fallback_node(state: AnalysisState) -> dict:
    """
    LangGraph node: replace an empty plug-in contour with every usable cell.

    Raises EmptyBoundaryError when COPE_EMPTY_BOUNDARY_FALLBACK is off.
    """
    if not settings.EMPTY_BOUNDARY_FALLBACK:
        raise EmptyBoundaryError(
            f"the plug-in contour at c={state['level']} is empty; "
            "set COPE_EMPTY_BOUNDARY_FALLBACK=true or use --boundary domain"
        )
    result = state["fit"]
    message = f"plug-in contour at c={state['level']:g} is empty; supremum taken over all of S"
    logger.warning(message)
    return {
        "region": RegionMask(result.geometry, result.usable),
        "fallback_engaged": True,
        "warnings": [message],
        "current_stage": "domain_fallback",
    }
