"""Bootstrap the supremum, derive a, and build the CoPE sets."""

from loguru import logger

from src.config import settings
from src.core.bootstrap import degenerate_sample, sup_distribution_blocked, threshold
from src.core.cope import cope_sets
from src.core.grid import RegionMask
from src.graph.state import AnalysisState
from src.models.reports import Provenance


def bootstrap_node(state: AnalysisState) -> dict:
    """
    LangGraph node: M multiplier-bootstrap suprema over the region, then a.

    An all-flagged domain leaves nothing to bootstrap over; a is then 0.
    """
    result = state["fit"]
    region = state["region"]
    M, seed = state["boot_reps"], state["seed"]
    warnings = []

    if isinstance(region, RegionMask) and region.count == 0:
        message = "no usable cells to bootstrap over; threshold set to 0"
        logger.warning(message)
        warnings.append(message)
        sample = degenerate_sample(result.normalized_residuals, M, seed, "whole-domain")
    else:
        logger.info("🎲 Bootstrap: M={} seed={} block={}", M, seed, state.get("block", settings.BOOT_BLOCK))
        sample = sup_distribution_blocked(
            result.normalized_residuals,
            region,
            M,
            seed,
            block=state.get("block", settings.BOOT_BLOCK),
            min_reps=settings.MIN_BOOT_REPS,
        )
        if M < settings.MIN_BOOT_REPS:
            warnings.append(f"M={M} is below the recommended {settings.MIN_BOOT_REPS}")

    a = threshold(sample, state["alpha"])
    logger.info("Threshold a = {:.4f} (order statistic {} of {})", a.a, a.order_index, M)
    return {"sup_sample": sample, "threshold": a, "warnings": warnings, "current_stage": "bootstrap"}


def provenance_for(state: AnalysisState) -> Provenance:
    design = state["design"]
    return Provenance(
        seed=state["seed"],
        M=state["boot_reps"],
        alpha=state["alpha"],
        level=state["level"],
        boundary_mode=state["boundary_mode"],
        discretization=state.get("discretization", "interpolated"),
        sigma_policy=settings.SIGMA_POLICY,
        variance_divisor=settings.VARIANCE_DIVISOR,
        block=state.get("block", settings.BOOT_BLOCK),
        fallback_engaged=state.get("fallback_engaged", False),
        flagged_cells=state["fit"].flagged.count,
        extra={
            "time_shift_a": repr(design.shift_a),
            "time_shift_b": repr(design.shift_b),
            "pi_n": repr(design.spec.pi_n),
            "scale": repr(design.spec.scale),
        },
    )


def cope_node(state: AnalysisState) -> dict:
    """LangGraph node: threshold the deviation field at ±a."""
    result = cope_sets(
        state["deviation"],
        state["threshold"],
        state["level"],
        sup_sample=state["sup_sample"],
        provenance=provenance_for(state),
    )
    logger.info(
        "🎯 CoPE sets: upper={} point={} lower={} band={}",
        result.upper.count, result.point_estimate.count, result.lower.count, result.band.count,
    )
    return {"result": result, "current_stage": "cope"}
