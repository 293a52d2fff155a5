"""Analyze workflow: the CoPE pipeline as a LangGraph StateGraph."""

from typing import Literal, Optional

from langgraph.graph import END, StateGraph
from loguru import logger

from src.config import settings
from src.graph.state import AnalysisState
from src.nodes import (
    boundary_node,
    bootstrap_node,
    cope_node,
    domain_fallback_node,
    fit_node,
    ingest_node,
    render_node,
    summarize_node,
)


# ──────────────────────────── Gate Functions ────────────────────────────


def boundary_gate(state: AnalysisState) -> Literal["bootstrap", "domain_fallback"]:
    """
    Conditional edge after boundary extraction.

    - Non-empty region → bootstrap over it
    - Empty plug-in contour → whole-domain fallback (or EmptyBoundaryError)
    """
    if state.get("region_empty", False) and state.get("boundary_mode") == "plugin":
        return "domain_fallback"
    return "bootstrap"


# ──────────────────────────── Workflow Builder ────────────────────────────


def create_analysis_workflow(checkpointer=None):
    """
    Create the analyze LangGraph workflow.

    Pipeline:
        ingest → fit → boundary → [boundary_gate]
                                    ↓ region        ↓ empty
                                    ↓          domain_fallback
                                 bootstrap ←────────┘
        bootstrap → cope → render → summarize → END

    Args:
        checkpointer: Optional LangGraph checkpointer for persistence.

    Returns:
        Compiled LangGraph workflow.
    """
    workflow = StateGraph(AnalysisState)

    workflow.add_node("ingest", ingest_node)
    workflow.add_node("fit", fit_node)
    workflow.add_node("boundary", boundary_node)
    workflow.add_node("domain_fallback", domain_fallback_node)
    workflow.add_node("bootstrap", bootstrap_node)
    workflow.add_node("cope", cope_node)
    workflow.add_node("render", render_node)
    workflow.add_node("summarize", summarize_node)

    workflow.set_entry_point("ingest")
    workflow.add_edge("ingest", "fit")
    workflow.add_edge("fit", "boundary")
    workflow.add_conditional_edges(
        "boundary",
        boundary_gate,
        {"bootstrap": "bootstrap", "domain_fallback": "domain_fallback"},
    )
    workflow.add_edge("domain_fallback", "bootstrap")
    workflow.add_edge("bootstrap", "cope")
    workflow.add_edge("cope", "render")
    workflow.add_edge("render", "summarize")
    workflow.add_edge("summarize", END)

    logger.debug("Analysis workflow compiled")
    return workflow.compile(checkpointer=checkpointer)


def run_analysis(
    input_path: str,
    covariates_path: Optional[str] = None,
    out_prefix: Optional[str] = None,
    level: Optional[float] = None,
    alpha: Optional[float] = None,
    boot_reps: Optional[int] = None,
    seed: Optional[int] = None,
    boundary_mode: Optional[str] = None,
    discretization: Optional[str] = None,
    render: bool = True,
    verbose: Optional[bool] = None,
    on_node_complete=None,
) -> dict:
    """
    Run the full analyze pipeline; unset arguments fall back to settings.

    Args:
        input_path: GridStackFile with the observation layers.
        covariates_path: Sidecar CSV; defaults to ``<stem>_covariates.csv``.
        out_prefix: Where to write figure, summaries and mask stack; nothing is written when None.
        on_node_complete: Optional callback(node_name, node_output, full_state)
            invoked after each graph node completes.

    Returns:
        Final AnalysisState dict.
    """
    from src.utils.logging import setup_logging
    log_file = f"{out_prefix}.log" if out_prefix else None
    setup_logging(verbose, log_file=log_file)

    workflow = create_analysis_workflow()
    initial_state: AnalysisState = {
        "input_path": str(input_path),
        "covariates_path": str(covariates_path) if covariates_path else "",
        "out_prefix": str(out_prefix) if out_prefix else None,
        "level": settings.LEVEL if level is None else level,
        "alpha": settings.ALPHA if alpha is None else alpha,
        "boot_reps": settings.BOOT_REPS if boot_reps is None else boot_reps,
        "seed": settings.SEED if seed is None else seed,
        "boundary_mode": boundary_mode or settings.BOUNDARY_MODE,
        "discretization": discretization or settings.BOUNDARY_DISCRETIZATION,
        "block": settings.BOOT_BLOCK,
        "render": render,
        "fallback_engaged": False,
        "outputs": {"log": log_file} if log_file else {},
        "warnings": [],
        "current_stage": "starting",
    }

    logger.info("🔥 CoPE analysis starting: input={}", input_path)
    if on_node_complete:
        result = dict(initial_state)
        for output in workflow.stream(initial_state):
            for node_name, node_output in output.items():
                for key, value in node_output.items():
                    if key == "warnings":
                        result[key] = result.get(key, []) + value
                    elif key == "outputs":
                        result[key] = {**result.get(key, {}), **value}
                    else:
                        result[key] = value
                try:
                    on_node_complete(node_name, node_output, result)
                except Exception as e:
                    logger.warning("on_node_complete callback error: {}", str(e))
    else:
        result = workflow.invoke(initial_state)

    logger.info("🏁 CoPE analysis complete: stage={}", result.get("current_stage"))
    return result
