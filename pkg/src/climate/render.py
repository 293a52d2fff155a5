"""SVG figures: a heat map with the Â (purple), Â⁺ (red) and Â⁻ (green) contours."""

from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from src.core.cope import CopeResult  # noqa: E402
from src.core.grid import ContourSet, ScalarField, extract_boundary  # noqa: E402
from src.errors import GeometryError, OutputError  # noqa: E402

POINT_COLOR = "purple"
UPPER_COLOR = "red"
LOWER_COLOR = "green"
TRUTH_COLOR = "black"


def cope_contours(result: CopeResult) -> dict[str, ContourSet]:
    """Contours of the deviation field at 0, +a and -a over its finite cells."""
    dev = result.deviation
    finite = dev.valid & np.isfinite(dev.values)
    field = ScalarField(dev.geometry, np.where(finite, dev.values, 0.0), finite)
    a = result.threshold.a
    return {
        "point": extract_boundary(field, 0.0),
        "upper": extract_boundary(field, a),
        "lower": extract_boundary(field, -a),
    }


def _add(ax, contour: ContourSet, color: str, label: str, style: str = "-") -> None:
    if contour.is_empty or len(contour.segments) == 0:
        return
    ax.add_collection(LineCollection(contour.polylines(), colors=color, linewidths=1.2, linestyles=style, label=label))


def render(
    result: CopeResult,
    background: ScalarField,
    path: Union[str, Path],
    truth_contour: Optional[ContourSet] = None,
    title: Optional[str] = None,
) -> Path:
    """Write the figure to ``path``; the format follows the suffix (SVG by default)."""
    if background.geometry != result.geometry:
        raise GeometryError("background field and CoPE sets live on different grids")
    path = Path(path)
    g = background.geometry

    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    shown = np.where(background.valid, background.values, np.nan)
    im = ax.imshow(shown, origin="lower", extent=g.extent(), cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.85)

    lines = cope_contours(result)
    _add(ax, lines["lower"], LOWER_COLOR, "Â⁻")
    _add(ax, lines["point"], POINT_COLOR, "Â")
    _add(ax, lines["upper"], UPPER_COLOR, "Â⁺")
    if truth_contour is not None:
        _add(ax, truth_contour, TRUTH_COLOR, "∂A", style="--")

    left, right, bottom, top = g.extent()
    ax.set_xlim(left, right)
    ax.set_ylim(bottom, top)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or f"c = {result.level_c:g}, a = {result.threshold.a:.3f}")
    if ax.collections:
        ax.legend(loc="upper right", fontsize="small")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format=path.suffix.lstrip(".") or "svg", metadata={"Date": None} if path.suffix == ".svg" else None)
    except OSError as exc:
        raise OutputError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
