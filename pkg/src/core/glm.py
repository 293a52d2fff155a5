"""Mass-univariate least squares: Y(s) = X b(s) + ε(s) at every cell."""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger
from scipy import linalg

from src.core.grid import FieldStack, GridGeometry, RegionMask, ScalarField
from src.errors import (
    ConfigError,
    DegenerateVarianceError,
    DesignError,
    GeometryError,
    InvalidFieldError,
)

# σ̂ below this multiple of max |Y| at a cell is least-squares roundoff
_ROUNDOFF = 1e3 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class DesignSpec:
    """
    Design matrix and the constants that standardize coefficient k.

    ``coef_index`` is 1-based. ``v`` = π_n^{-1/2} e_kᵀ (XᵀX)^{-1/2} and
    ``scale`` = ‖v‖₂ π_n^{1/2}.
    """

    X: np.ndarray
    coef_index: int
    xtx_inv: np.ndarray
    pi_n: float
    v: np.ndarray
    scale: float
    rcond: float

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class FitResult:
    """Coefficient surfaces, residuals, σ̂ and normalized residuals of one fit."""

    bhat: list[ScalarField]
    residuals: FieldStack
    sigma_hat: ScalarField
    normalized_residuals: FieldStack
    flagged: RegionMask
    divisor: int

    @property
    def geometry(self) -> GridGeometry:
        return self.sigma_hat.geometry

    @property
    def usable(self) -> np.ndarray:
        """Masked-in cells whose σ̂ cleared the floor."""
        return self.sigma_hat.valid & ~self.flagged.inside


def build_design(X, coef_index: int = 1, min_rcond: float = 1e-12) -> DesignSpec:
    """
    Validate X and derive (XᵀX)⁻¹, π_n, v and the scale of coefficient ``coef_index``.

    Raises:
        DesignError: n < p, or XᵀX singular / reciprocal condition below ``min_rcond``.
        ConfigError: coefficient index outside 1..p.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if n < p:
        raise DesignError(f"design has n={n} rows but p={p} columns; need n >= p")
    if not 1 <= coef_index <= p:
        raise ConfigError(f"coefficient index {coef_index} outside 1..{p}")

    xtx = X.T @ X
    cond = np.linalg.cond(xtx)
    rcond = 0.0 if not np.isfinite(cond) else 1.0 / cond
    if rcond < min_rcond:
        raise DesignError(
            f"XᵀX is singular or ill-conditioned (reciprocal condition number {rcond:.3e} "
            f"< {min_rcond:.0e}); check for constant or collinear covariates",
            rcond=rcond,
        )

    w, Q = linalg.eigh(xtx)
    xtx_inv = (Q / w) @ Q.T
    inv_sqrt = (Q / np.sqrt(w)) @ Q.T

    k = coef_index - 1
    pi_n = float(xtx_inv[k, k])
    if pi_n <= 0:
        raise DesignError(f"π_n = {pi_n} is not positive", rcond=rcond)
    v = inv_sqrt[k, :] / np.sqrt(pi_n)
    scale = float(np.linalg.norm(v) * np.sqrt(pi_n))

    logger.debug("Design n={} p={} k={}: π_n={:.6g} scale={:.6g} rcond={:.3e}", n, p, coef_index, pi_n, scale, rcond)
    return DesignSpec(X=X, coef_index=coef_index, xtx_inv=xtx_inv, pi_n=pi_n, v=v, scale=scale, rcond=rcond)


def fit(
    stack: FieldStack,
    design: DesignSpec,
    variance_divisor: Literal["n", "unbiased"] = "n",
    sigma_floor_rel: float = 1e-12,
    sigma_policy: Literal["exclude", "strict"] = "exclude",
) -> FitResult:
    """
    Least-squares fit at every masked-in cell.

    σ̂² = Σ R_j² / n by default (``variance_divisor="unbiased"`` uses n - p).
    Cells with σ̂ ≤ ``sigma_floor_rel`` · median σ̂, or with σ̂ at roundoff level
    relative to their own data, are flagged; under the ``strict`` policy any
    flagged cell raises DegenerateVarianceError.

    Raises:
        DesignError: n ≤ p leaves no residual degrees of freedom.
    """
    if stack.n != design.n:
        raise GeometryError(f"stack has {stack.n} layers but the design has {design.n} rows")
    if design.n <= design.p:
        raise DesignError(f"n={design.n} layers leave no residual degrees of freedom for p={design.p} columns")

    g = stack.geometry
    valid = stack.valid.ravel()
    Y = stack.flat()[:, valid]
    if not np.isfinite(Y).all():
        raise InvalidFieldError("observation stack has non-finite values on masked-in cells")

    X = design.X
    B = design.xtx_inv @ (X.T @ Y)
    R = Y - X @ B

    divisor = design.n if variance_divisor == "n" else design.n - design.p
    sigma = np.sqrt((R**2).sum(axis=0) / divisor)

    floor = sigma_floor_rel * (np.median(sigma) if sigma.size else 0.0)
    roundoff = _ROUNDOFF * (np.abs(Y).max(axis=0) if Y.size else 0.0)
    flagged = (sigma <= floor) | (sigma <= roundoff)
    n_flagged = int(flagged.sum())
    if n_flagged:
        if sigma_policy == "strict":
            raise DegenerateVarianceError(
                f"{n_flagged} cell(s) have σ̂ at or below the floor {floor:.3e}; "
                "set COPE_SIGMA_POLICY=exclude to drop them from contours and suprema",
                flagged=n_flagged,
            )
        logger.warning("{} cell(s) with σ̂ at or below the floor {:.3e} excluded from contours and suprema", n_flagged, floor)

    safe = np.where(flagged, 1.0, sigma)
    Rn = np.where(flagged, 0.0, R / safe)

    def scatter(cols: np.ndarray, fill: float) -> np.ndarray:
        out = np.full((cols.shape[0], g.size), fill)
        out[:, valid] = cols
        return out

    mask = stack.valid
    flagged_full = np.zeros(g.size, dtype=bool)
    flagged_full[valid] = flagged

    bhat_full = scatter(B, np.nan)
    return FitResult(
        bhat=[ScalarField(g, bhat_full[k], mask) for k in range(design.p)],
        residuals=FieldStack(g, scatter(R, 0.0), mask),
        sigma_hat=ScalarField(g, scatter(sigma[None, :], np.nan)[0], mask),
        normalized_residuals=FieldStack(g, scatter(Rn, 0.0), mask & ~flagged_full.reshape(g.shape)),
        flagged=RegionMask(g, flagged_full),
        divisor=divisor,
    )


def standardized_deviation(fit: FitResult, design: DesignSpec, c: float) -> ScalarField:
    """
    (b̂_k - c) / (scale · σ̂) cellwise.

    Flagged cells take the a·σ̂ → 0 limit: +∞ above c, -∞ below, 0 at c.
    """
    if len(fit.bhat) != design.p or fit.residuals.n != design.n:
        raise ConfigError("fit was not produced with this design")
    b = fit.bhat[design.coef_index - 1].values
    sigma = fit.sigma_hat.values
    usable = fit.usable
    diff = b - c

    dev = np.zeros(b.shape)
    dev[usable] = diff[usable] / (design.scale * sigma[usable])
    limit = fit.flagged.inside
    dev[limit] = np.sign(diff[limit]) * np.inf
    dev[limit & (diff == 0)] = 0.0
    dev[~fit.sigma_hat.valid] = np.nan
    return ScalarField(fit.geometry, dev, fit.sigma_hat.valid)
