"""
GridStackFile: a fixed little-endian header followed by n_layers row-major
float64 grids. Masked-out cells are NaN in every layer.
"""

from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from loguru import logger

from src.core.grid import FieldStack, GridGeometry
from src.errors import IngestionError, OutputError

MAGIC = b"COPE"
VERSION = 1
VALUE_FLOAT64 = 1

HEADER = np.dtype(
    [
        ("magic", "S4"),
        ("version", "<u4"),
        ("nx", "<u4"),
        ("ny", "<u4"),
        ("n_layers", "<u4"),
        ("value_type", "<u4"),
        ("row_major", "<u4"),
        ("spacing_x", "<f8"),
        ("spacing_y", "<f8"),
        ("origin_x", "<f8"),
        ("origin_y", "<f8"),
    ]
)
PAYLOAD = np.dtype("<f8")

PathLike = Union[str, Path]


def write_stack(path: PathLike, stack: FieldStack) -> Path:
    """Write ``stack`` (NaN on masked-out cells) to ``path``."""
    path = Path(path)
    g = stack.geometry
    header = np.zeros(1, dtype=HEADER)
    header[0] = (MAGIC, VERSION, g.nx, g.ny, stack.n, VALUE_FLOAT64, 1,
                 g.spacing_x, g.spacing_y, g.origin_x, g.origin_y)
    payload = np.array(stack.values, dtype=PAYLOAD)
    payload[:, ~stack.valid] = np.nan
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(header.tobytes())
            fh.write(payload.tobytes(order="C"))
    except OSError as exc:
        raise OutputError(f"cannot write grid stack {path}: {exc}") from exc
    logger.debug("Wrote {} layers of {}x{} to {}", stack.n, g.ny, g.nx, path)
    return path


def read_stack(path: PathLike) -> FieldStack:
    """Read a GridStackFile; cells NaN in every layer become masked out."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IngestionError(f"cannot read grid stack {path}: {exc}") from exc
    if len(raw) < HEADER.itemsize:
        raise IngestionError(f"{path} is shorter than the {HEADER.itemsize}-byte header")

    h = np.frombuffer(raw[: HEADER.itemsize], dtype=HEADER)[0]
    if bytes(h["magic"]) != MAGIC:
        raise IngestionError(f"{path} does not start with the COPE magic bytes")
    if int(h["version"]) != VERSION:
        raise IngestionError(f"{path} has unsupported version {int(h['version'])}")
    if int(h["value_type"]) != VALUE_FLOAT64 or int(h["row_major"]) != 1:
        raise IngestionError(f"{path} must hold row-major float64 values")

    nx, ny, n = int(h["nx"]), int(h["ny"]), int(h["n_layers"])
    expected = nx * ny * n * PAYLOAD.itemsize
    body = raw[HEADER.itemsize:]
    if len(body) != expected:
        raise IngestionError(
            f"{path}: payload is {len(body)} bytes, header promises {n} layers of {ny}x{nx} ({expected} bytes)"
        )

    try:
        geometry = GridGeometry(
            nx=nx, ny=ny,
            spacing_x=float(h["spacing_x"]), spacing_y=float(h["spacing_y"]),
            origin_x=float(h["origin_x"]), origin_y=float(h["origin_y"]),
        )
    except ValueError as exc:
        raise IngestionError(f"{path}: invalid grid header: {exc}") from exc

    values = np.frombuffer(body, dtype=PAYLOAD).reshape(n, ny, nx)
    nan = np.isnan(values)
    all_nan = nan.all(axis=0)
    partial = nan.any(axis=0) & ~all_nan
    if partial.any():
        i, j = np.argwhere(partial)[0]
        raise IngestionError(
            f"{path}: cell (row {i}, col {j}) is NaN in some layers but not all; "
            "masked-out cells must be NaN in every layer"
        )
    mask: Optional[np.ndarray] = ~all_nan if all_nan.any() else None
    return FieldStack(geometry, values, mask)


def read_covariates(path: PathLike, n_layers: int) -> pd.DataFrame:
    """Sidecar CSV with columns layer_index, period (a|b), time; one row per layer."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={"period": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IngestionError(f"cannot read covariates {path}: {exc}") from exc

    missing = {"layer_index", "period", "time"} - set(frame.columns)
    if missing:
        raise IngestionError(f"{path} lacks column(s): {', '.join(sorted(missing))}")
    frame = frame[["layer_index", "period", "time"]].copy()
    frame["period"] = frame["period"].str.strip().str.lower()

    bad = ~frame["period"].isin(["a", "b"])
    if bad.any():
        raise IngestionError(f"{path}: period must be 'a' or 'b', got {frame.loc[bad, 'period'].iloc[0]!r}")
    indices = sorted(frame["layer_index"].astype(int))
    if indices != list(range(n_layers)):
        raise IngestionError(f"{path} must list every layer 0..{n_layers - 1} exactly once")
    frame["layer_index"] = frame["layer_index"].astype(int)
    frame["time"] = frame["time"].astype(float)
    return frame.sort_values("layer_index", ignore_index=True)


def write_covariates(path: PathLike, periods: list[str], times) -> Path:
    path = Path(path)
    frame = pd.DataFrame({"layer_index": range(len(periods)), "period": periods, "time": np.asarray(times, float)})
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"cannot write covariates {path}: {exc}") from exc
    return path


def convert_csv_grids(
    csv_path: PathLike,
    out_path: PathLike,
    spacing: tuple[float, float] = (1.0, 1.0),
    origin: tuple[float, float] = (0.0, 0.0),
) -> FieldStack:
    """
    Long-format CSV (layer_index, row, col, value) to a GridStackFile.

    Cells absent from every layer are masked out.
    """
    try:
        frame = pd.read_csv(csv_path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise IngestionError(f"cannot read {csv_path}: {exc}") from exc
    missing = {"layer_index", "row", "col", "value"} - set(frame.columns)
    if missing:
        raise IngestionError(f"{csv_path} lacks column(s): {', '.join(sorted(missing))}")

    layer = frame["layer_index"].to_numpy(int)
    row = frame["row"].to_numpy(int)
    col = frame["col"].to_numpy(int)
    if (layer < 0).any() or (row < 0).any() or (col < 0).any():
        raise IngestionError(f"{csv_path}: indices must be non-negative")
    dup = frame.duplicated(subset=["layer_index", "row", "col"], keep=False)
    if dup.any():
        first = frame.loc[dup].iloc[0]
        raise IngestionError(
            f"{csv_path}: {int(dup.sum())} rows repeat a (layer_index, row, col); first at "
            f"layer {int(first['layer_index'])}, row {int(first['row'])}, col {int(first['col'])}"
        )
    n, ny, nx = layer.max() + 1, row.max() + 1, col.max() + 1

    values = np.full((n, ny, nx), np.nan)
    values[layer, row, col] = frame["value"].to_numpy(float)
    geometry = GridGeometry(nx=nx, ny=ny, spacing_x=spacing[0], spacing_y=spacing[1],
                            origin_x=origin[0], origin_y=origin[1])
    all_nan = np.isnan(values).all(axis=0)
    if (np.isnan(values).any(axis=0) & ~all_nan).any():
        raise IngestionError(f"{csv_path}: some cells are present in only part of the layers")
    stack = FieldStack(geometry, values, ~all_nan if all_nan.any() else None)
    write_stack(out_path, stack)
    logger.info("Converted {} rows into {} layers of {}x{}", len(frame), n, ny, nx)
    return stack
