"""AnalysisState: shared state flowing through the analyze graph."""

from typing import Annotated, Any, Dict, List, Optional, TypedDict


# ──────────────────────────── Custom Reducers ────────────────────────────


def merge_lists(existing: List[str] | None, new: List[str] | None) -> List[str]:
    """Concatenate two lists (warnings accumulate across nodes)."""
    return (existing or []) + (new or [])


def merge_dicts(existing: Dict[str, str] | None, new: Dict[str, str] | None) -> Dict[str, str]:
    """Later nodes add output paths without dropping earlier ones."""
    return {**(existing or {}), **(new or {})}


# ──────────────────────────── State Schema ────────────────────────────


class AnalysisState(TypedDict, total=False):
    """
    Central state of one analyze run.

    Inputs come from the CLI (or run_analysis); numerical objects are stored
    as-is since the graph runs in-process without a checkpointer.
    """

    # ===== Input =====
    input_path: str
    covariates_path: str
    out_prefix: Optional[str]
    level: float
    alpha: float
    boot_reps: int
    seed: int
    boundary_mode: str
    """plugin | domain"""

    discretization: str
    block: int
    render: bool

    # ===== Data =====
    stack: Any
    """FieldStack, permuted to period-a-first order."""

    design: Any
    """TwoPeriodDesign."""

    fit: Any
    deviation: Any

    # ===== Bootstrap =====
    region: Any
    """ContourSet or RegionMask the supremum is taken over."""

    region_empty: bool
    fallback_engaged: bool
    sup_sample: Any
    threshold: Any

    # ===== Result =====
    result: Any
    """CopeResult."""

    outputs: Annotated[Dict[str, str], merge_dicts]
    summary: Optional[Dict[str, Any]]
    final_summary: Optional[str]
    """Markdown report for console display."""

    # ===== Workflow Control =====
    current_stage: str
    warnings: Annotated[List[str], merge_lists]
