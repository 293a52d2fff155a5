"""Synthetic two-period stack with a known mean-difference field."""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger
from scipy import ndimage

from src.climate.design import equally_spaced_times
from src.climate.stackfile import write_covariates, write_stack
from src.core.grid import FieldStack, GridGeometry


@dataclass(frozen=True)
class SurrogatePaths:
    stack: Path
    covariates: Path
    truth: Path


def disk_difference(geometry: GridGeometry, radius_fraction: float = 0.25, inside: float = 2.5) -> np.ndarray:
    """``inside`` on a centered disk, 0 elsewhere."""
    x, y = np.meshgrid(geometry.x_coords(), geometry.y_coords())
    left, right, bottom, top = geometry.extent()
    cx, cy = (left + right) / 2, (bottom + top) / 2
    r = radius_fraction * min(right - left, top - bottom)
    return np.where((x - cx) ** 2 + (y - cy) ** 2 <= r**2, inside, 0.0)


def make_surrogate(
    out_prefix: Union[str, Path],
    nx: int = 100,
    ny: int = 100,
    n_a: int = 29,
    n_b: int = 29,
    difference: float = 2.5,
    radius_fraction: float = 0.25,
    noise_sd: float = 0.5,
    smoothing: float = 2.0,
    seed: int = 0,
) -> SurrogatePaths:
    """
    Write ``<prefix>.cope``, ``<prefix>_covariates.csv`` and ``<prefix>_truth.cope``.

    Layer j of period p is baseline + [p = b] · difference + trend_p · t_j + noise,
    with smoothed Gaussian noise rescaled to standard deviation ``noise_sd``
    (zero gives exact data).
    """
    prefix = Path(out_prefix)
    geometry = GridGeometry(nx=nx, ny=ny, spacing_x=0.5, spacing_y=0.5, origin_x=0.25, origin_y=0.25)
    x, y = np.meshgrid(geometry.x_coords(), geometry.y_coords())
    baseline = 10.0 + 0.05 * x - 0.03 * y
    delta = disk_difference(geometry, radius_fraction, difference)

    t_a, t_b = equally_spaced_times(n_a), equally_spaced_times(n_b)
    rng = np.random.Generator(np.random.Philox(int(seed)))
    layers = []
    for period, times, trend in (("a", t_a, 0.02), ("b", t_b, 0.04)):
        for t in times:
            field = baseline + (delta if period == "b" else 0.0) + trend * t
            if noise_sd > 0:
                eps = ndimage.gaussian_filter(rng.standard_normal(geometry.shape), smoothing, mode="reflect")
                field = field + noise_sd * eps / eps.std()
            layers.append(field)

    paths = SurrogatePaths(
        stack=prefix.with_name(prefix.name + ".cope"),
        covariates=prefix.with_name(prefix.name + "_covariates.csv"),
        truth=prefix.with_name(prefix.name + "_truth.cope"),
    )
    write_stack(paths.stack, FieldStack(geometry, np.stack(layers)))
    write_covariates(paths.covariates, ["a"] * n_a + ["b"] * n_b, np.concatenate([t_a, t_b]))
    write_stack(paths.truth, FieldStack(geometry, delta[None, :, :]))
    logger.info("Surrogate {}x{} with n={} written to {}", ny, nx, n_a + n_b, paths.stack)
    return paths
