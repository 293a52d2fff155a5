"""Render the figure, serialize results and build the run summary."""

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from src.climate.render import render
from src.climate.stackfile import write_stack
from src.core.cope import CopeResult
from src.core.grid import FieldStack
from src.errors import OutputError
from src.graph.state import AnalysisState
from src.models.reports import AnalysisSummary

MASK_LAYERS = ("upper", "point_estimate", "lower", "band", "deviation")


def _prefix(state: AnalysisState) -> Path:
    return Path(state["out_prefix"])


def _with_suffix(prefix: Path, suffix: str) -> Path:
    return prefix.with_name(prefix.name + suffix)


def render_node(state: AnalysisState) -> dict:
    """
    LangGraph node: SVG heat map of b̂₁ with the three contours.

    Skipped when there is no output prefix or rendering is off.
    """
    if not state.get("out_prefix") or not state.get("render", True):
        return {"current_stage": "render"}
    result: CopeResult = state["result"]
    path = _with_suffix(_prefix(state), ".svg")
    render(result, state["fit"].bhat[0], path, title=f"T⁽ᵇ⁾ - T⁽ᵃ⁾, c = {state['level']:g}")
    logger.info("🖼️  Figure: {}", path)
    return {"outputs": {"figure": str(path)}, "current_stage": "render"}


def mask_stack(result: CopeResult) -> FieldStack:
    """Layers upper, point_estimate, lower, band (0/1) and the deviation field."""
    layers = [
        result.upper.inside.astype(float),
        result.point_estimate.inside.astype(float),
        result.lower.inside.astype(float),
        result.band.inside.astype(float),
        result.deviation.values,
    ]
    return FieldStack(result.geometry, np.stack(layers), result.deviation.valid)


def build_summary(state: AnalysisState) -> AnalysisSummary:
    result: CopeResult = state["result"]
    sample = state["sup_sample"]
    qs = (0.5, 0.9, 0.95, 0.99)
    quantiles = {f"q{int(q * 100)}": float(np.quantile(sample.values, q)) for q in qs}
    return AnalysisSummary(
        input_path=state["input_path"],
        n=state["stack"].n,
        level=state["level"],
        alpha=state["alpha"],
        a=result.threshold.a,
        order_index=result.threshold.order_index,
        region_descriptor=sample.region_descriptor,
        region_size=sample.region_size,
        upper_cells=result.upper.count,
        point_cells=result.point_estimate.count,
        lower_cells=result.lower.count,
        band_cells=result.band.count,
        provenance=result.provenance,
        sup_quantiles=quantiles,
        outputs=dict(state.get("outputs") or {}),
        warnings=list(state.get("warnings") or []),
    )


def summarize_node(state: AnalysisState) -> dict:
    """
    LangGraph node: write JSON, CSV and mask-stack outputs, then the Markdown report.

    Returns state updates for:
        - outputs
        - summary
        - final_summary
        - current_stage
    """
    outputs = {}
    if state.get("out_prefix"):
        prefix = _prefix(state)
        masks = write_stack(_with_suffix(prefix, "_masks.cope"), mask_stack(state["result"]))
        outputs["masks"] = str(masks)
        outputs["csv"] = str(_with_suffix(prefix, "_summary.csv"))
        outputs["json"] = str(_with_suffix(prefix, "_summary.json"))

    summary = build_summary({**state, "outputs": {**(state.get("outputs") or {}), **outputs}})

    if state.get("out_prefix"):
        try:
            pd.DataFrame([summary.to_row()]).to_csv(outputs["csv"], index=False, lineterminator="\n")
            Path(outputs["json"]).write_text(summary.model_dump_json(indent=2), encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write analysis summary: {exc}") from exc
        logger.info("📝 Summary: {}", outputs["json"])

    return {
        "outputs": outputs,
        "summary": summary.model_dump(),
        "final_summary": summary.to_markdown(),
        "current_stage": "complete",
    }
