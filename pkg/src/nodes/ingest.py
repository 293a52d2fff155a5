"""Ingest: read the grid stack and its covariates, build the two-period design."""

from pathlib import Path

from loguru import logger

from src.climate.design import design_from_covariates
from src.climate.stackfile import read_covariates, read_stack
from src.config import settings
from src.core.grid import FieldStack
from src.graph.state import AnalysisState


def default_covariates_path(input_path: str) -> str:
    """``<stem>_covariates.csv`` next to the stack file."""
    p = Path(input_path)
    return str(p.with_name(p.stem + "_covariates.csv"))


def ingest_node(state: AnalysisState) -> dict:
    """
    LangGraph node: load the stack, validate the sidecar, order layers period a first.

    Returns state updates for:
        - stack
        - design
        - current_stage
    """
    input_path = state["input_path"]
    covariates_path = state.get("covariates_path") or default_covariates_path(input_path)
    logger.info("📥 Ingest: {} (covariates {})", input_path, covariates_path)

    stack = read_stack(input_path)
    covariates = read_covariates(covariates_path, stack.n)
    design, order = design_from_covariates(covariates, min_rcond=settings.MIN_RCOND)
    stack = FieldStack(stack.geometry, stack.values[order], stack.mask)

    warnings = []
    if design.shift_a or design.shift_b:
        warnings.append(f"times re-centered by {design.shift_a:.6g} (period a) and {design.shift_b:.6g} (period b)")

    logger.info("Stack: {} layers on {}x{}, {} cells in S", stack.n, stack.geometry.ny, stack.geometry.nx, int(stack.valid.sum()))
    return {
        "stack": stack,
        "design": design,
        "covariates_path": covariates_path,
        "warnings": warnings,
        "current_stage": "ingest",
    }
