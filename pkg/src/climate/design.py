"""Two-period trend design: separate intercepts and centered linear trends per period."""

from dataclasses import dataclass

import numpy as np
import pandas as pd
from loguru import logger

from src.core.glm import DesignSpec, build_design
from src.errors import ConfigError, IngestionError

COLUMNS = ("T_b - T_a", "T_a", "m_a", "m_b")


@dataclass(frozen=True, eq=False)
class TwoPeriodDesign:
    """
    Rows 0..n_a-1 are period a, rows n_a.. are period b.

    Coefficient 1 is the mean difference T⁽ᵇ⁾ - T⁽ᵃ⁾; 2 is T⁽ᵃ⁾; 3 and 4 are
    the per-period trends on centered times.
    """

    n_a: int
    n_b: int
    t_a: np.ndarray
    t_b: np.ndarray
    shift_a: float
    shift_b: float
    spec: DesignSpec

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    @property
    def omega_a(self) -> float:
        return float((self.t_a**2).sum())

    @property
    def omega_b(self) -> float:
        return float((self.t_b**2).sum())


def _center(t, n: int, period: str) -> tuple[np.ndarray, float]:
    t = np.asarray(t, dtype=float).ravel()
    if t.size != n:
        raise ConfigError(f"period {period} has {n} layers but {t.size} time values")
    if not np.isfinite(t).all():
        raise ConfigError(f"period {period} time values must be finite")
    shift = float(t.mean())
    if abs(shift) > 1e-12 * max(1.0, float(np.abs(t).max())):
        logger.warning("Period {} times re-centered by subtracting {:.6g}", period, shift)
        return t - shift, shift
    return t, 0.0


def build_two_period_design(n_a: int, n_b: int, t_a, t_b, min_rcond: float = 1e-12) -> TwoPeriodDesign:
    """
    Assemble X with columns (T_b - T_a, T_a, m_a, m_b).

    Period-a rows are (0, 1, t, 0), period-b rows (1, 1, 0, t). Times are
    centered within each period and the applied shift is kept.
    """
    if n_a < 2 or n_b < 2:
        raise ConfigError(f"each period needs at least 2 layers, got n_a={n_a}, n_b={n_b}")
    ta, shift_a = _center(t_a, n_a, "a")
    tb, shift_b = _center(t_b, n_b, "b")

    X = np.zeros((n_a + n_b, 4))
    X[:n_a, 1] = 1.0
    X[:n_a, 2] = ta
    X[n_a:, 0] = 1.0
    X[n_a:, 1] = 1.0
    X[n_a:, 3] = tb

    spec = build_design(X, coef_index=1, min_rcond=min_rcond)
    logger.info("Two-period design n_a={} n_b={}: π_n={:.6g}, scale={:.6g}", n_a, n_b, spec.pi_n, spec.scale)
    return TwoPeriodDesign(n_a=n_a, n_b=n_b, t_a=ta, t_b=tb, shift_a=shift_a, shift_b=shift_b, spec=spec)


def equally_spaced_times(k: int) -> np.ndarray:
    """k equally spaced, centered times with unit step."""
    return np.arange(k, dtype=float) - (k - 1) / 2.0


def design_from_covariates(covariates: pd.DataFrame, min_rcond: float = 1e-12) -> tuple[TwoPeriodDesign, np.ndarray]:
    """
    Build the design from a sidecar table.

    Returns:
        The design and the layer order (period a first, each period by
        layer_index) the stack must be permuted into.
    """
    ordered = covariates.sort_values(["period", "layer_index"], kind="stable")
    a = ordered[ordered["period"] == "a"]
    b = ordered[ordered["period"] == "b"]
    if a.empty or b.empty:
        raise IngestionError("covariates must tag layers with both periods 'a' and 'b'")
    design = build_two_period_design(len(a), len(b), a["time"].to_numpy(), b["time"].to_numpy(), min_rcond=min_rcond)
    order = np.concatenate([a["layer_index"].to_numpy(), b["layer_index"].to_numpy()]).astype(int)
    return design, order
