"""Gaussian multiplier bootstrap for sup |G̃| over a region, and the threshold a."""

import hashlib
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.core.grid import ContourSet, FieldStack, RegionMask, ScalarField, interpolate_stack
from src.errors import ConfigError, CopeValidationError, EmptyBoundaryError, GeometryError
from src.utils.rng import multiplier_block, replicate_generator

RegionDescriptor = Literal["contour", "whole-domain", "cell mask"]
Region = Union[ContourSet, RegionMask]


@dataclass(frozen=True, eq=False)
class SupSample:
    """M bootstrap suprema of |G̃| plus what produced them."""

    values: np.ndarray
    seed: int
    region_descriptor: RegionDescriptor
    residual_fingerprint: str
    region_size: int

    @property
    def M(self) -> int:
        return int(self.values.shape[0])


class Threshold(BaseModel):
    """The CoPE threshold a at nominal level alpha."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(ge=0.0)
    alpha: float = Field(gt=0.0, lt=1.0)
    order_index: int = Field(ge=1, description="1-based rank of a among the sorted suprema")


def residual_fingerprint(residuals: FieldStack) -> str:
    h = hashlib.blake2b(digest_size=16)
    h.update(np.ascontiguousarray(residuals.values).tobytes())
    h.update(residuals.valid.tobytes())
    return h.hexdigest()


def bootstrap_realization(residuals: FieldStack, multipliers) -> ScalarField:
    """G̃(s) = n^{-1/2} Σ_j g_j R̃_j(s)."""
    g = np.asarray(multipliers, dtype=float)
    if g.shape != (residuals.n,):
        raise CopeValidationError(f"expected {residuals.n} multipliers, got {g.size}")
    field = np.tensordot(g, residuals.values, axes=(0, 0)) / math.sqrt(residuals.n)
    return ScalarField(residuals.geometry, field, residuals.mask)


def sample_covariance(residuals: FieldStack, s1: tuple[int, int], s2: tuple[int, int]) -> float:
    """n⁻¹ Σ_j R_j(s₁) R_j(s₂), the conditional covariance of G̃."""
    for s in (s1, s2):
        if not residuals.valid[s]:
            raise GeometryError(f"cell {s} is outside S")
    r1 = residuals.values[(slice(None),) + tuple(s1)]
    r2 = residuals.values[(slice(None),) + tuple(s2)]
    return float((r1 * r2).sum() / residuals.n)


def region_matrix(residuals: FieldStack, region: Region) -> np.ndarray:
    """Residuals evaluated on the region, as an (n, P) array."""
    if region.geometry != residuals.geometry:
        raise GeometryError("bootstrap region and residuals live on different grids")
    if isinstance(region, ContourSet):
        flat_ok = residuals.valid.ravel()
        keep = flat_ok[region.cells].all(axis=1)
        if not keep.all():
            region = ContourSet(
                region.geometry, region.source_level, region.points[keep],
                region.cells[keep], region.weights[keep],
            )
        return np.ascontiguousarray(interpolate_stack(residuals, region).T)
    cells = (region.inside & residuals.valid).ravel()
    return np.ascontiguousarray(residuals.flat()[:, cells])


def _describe(region: Region, residuals: FieldStack) -> RegionDescriptor:
    if isinstance(region, ContourSet):
        return "contour"
    if np.array_equal(region.inside & residuals.valid, residuals.valid):
        return "whole-domain"
    return "cell mask"


# Columns per matrix product
KERNEL_WIDTH = 64


def _kernel_sup(Et: np.ndarray, V: np.ndarray, start: int) -> np.ndarray:
    """
    sup over the region of |Et · v| for the replicates start, start + 1, ... in V.

    ``Et`` is (P, n) and ``V`` is (n, k). Every product has the same
    (P × n)·(n × KERNEL_WIDTH) shape with replicate m in column m % KERNEL_WIDTH
    and zeros elsewhere, so a replicate's supremum does not depend on how the
    caller grouped replicates.
    """
    k = V.shape[1]
    out = np.empty(k)
    pos = 0
    while pos < k:
        offset = (start + pos) % KERNEL_WIDTH
        take = min(KERNEL_WIDTH - offset, k - pos)
        buf = np.zeros((V.shape[0], KERNEL_WIDTH))
        buf[:, offset:offset + take] = V[:, pos:pos + take]
        out[pos:pos + take] = np.abs(Et @ buf)[:, offset:offset + take].max(axis=0)
        pos += take
    return out


def _prepare(residuals: FieldStack, region: Region, M: int, min_reps: int):
    if M < 1:
        raise ConfigError(f"bootstrap needs at least one replicate, got M={M}")
    if M < min_reps:
        logger.warning("M={} bootstrap replicates is below the recommended {}", M, min_reps)
    E = region_matrix(residuals, region)
    if E.shape[1] == 0:
        raise EmptyBoundaryError(
            "bootstrap region is empty; enable COPE_EMPTY_BOUNDARY_FALLBACK or use --boundary domain"
        )
    return np.ascontiguousarray(E.T)


def sup_distribution(
    residuals: FieldStack,
    region: Region,
    M: int,
    seed: int,
    min_reps: int = 100,
) -> SupSample:
    """One replicate at a time: draw g from stream (seed, m), record sup |G̃| on the region."""
    Et = _prepare(residuals, region, M, min_reps)
    root_n = math.sqrt(residuals.n)
    values = np.empty(M)
    for m in range(M):
        g = replicate_generator(seed, m).standard_normal(residuals.n)
        values[m] = _kernel_sup(Et, g[:, None], m)[0] / root_n
    return SupSample(values, int(seed), _describe(region, residuals), residual_fingerprint(residuals), Et.shape[0])


def sup_distribution_blocked(
    residuals: FieldStack,
    region: Region,
    M: int,
    seed: int,
    block: int = 256,
    min_reps: int = 100,
) -> SupSample:
    """
    Same suprema as sup_distribution, bit for bit. Multipliers are drawn
    ``block`` replicates at a time and pushed through (P × n)·(n × KERNEL_WIDTH)
    matrix products.
    """
    if block < 1:
        raise ConfigError(f"block size must be positive, got {block}")
    Et = _prepare(residuals, region, M, min_reps)
    root_n = math.sqrt(residuals.n)
    values = np.empty(M)
    for start in range(0, M, block):
        stop = min(start + block, M)
        V = multiplier_block(seed, start, stop, residuals.n)
        values[start:stop] = _kernel_sup(Et, V, start) / root_n
    logger.debug("Bootstrap: M={} region={} points, n={}", M, Et.shape[0], residuals.n)
    return SupSample(values, int(seed), _describe(region, residuals), residual_fingerprint(residuals), Et.shape[0])


def degenerate_sample(residuals: FieldStack, M: int, seed: int, descriptor: RegionDescriptor) -> SupSample:
    """All-zero suprema for a region with no usable cells (sup over ∅ taken as 0)."""
    return SupSample(np.zeros(M), int(seed), descriptor, residual_fingerprint(residuals), 0)


def threshold(sample: SupSample, alpha: float) -> Threshold:
    """a = the ⌈(1 - alpha) M⌉-th order statistic of the suprema."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    M = sample.M
    k = math.ceil(round((1.0 - alpha) * M, 9))
    k = min(max(k, 1), M)
    a = float(np.sort(sample.values)[k - 1])
    return Threshold(a=a, alpha=alpha, order_index=k)


def empirical_cdf(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Fraction of values ≤ each grid point."""
    ordered = np.sort(np.asarray(values))
    return np.searchsorted(ordered, grid, side="right") / ordered.size

