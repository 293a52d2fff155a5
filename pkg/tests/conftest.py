"""Shared fixtures: small grids, random stacks, a tiny surrogate on disk."""

import numpy as np
import pytest

from src.climate.surrogate import make_surrogate
from src.core.grid import FieldStack, GridGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    return GridGeometry(nx=6, ny=5)


@pytest.fixture
def residual_stack(rng, small_grid):
    return FieldStack(small_grid, rng.normal(size=(15,) + small_grid.shape))


@pytest.fixture
def surrogate(tmp_path):
    """30x30 surrogate, 8 + 8 layers, moderate noise."""
    return make_surrogate(tmp_path / "sur", nx=30, ny=30, n_a=8, n_b=8, noise_sd=0.3, seed=3)


@pytest.fixture
def exact_surrogate(tmp_path):
    """Noise-free surrogate: every mask must equal the true excursion set."""
    return make_surrogate(tmp_path / "exact", nx=24, ny=24, n_a=6, n_b=6, noise_sd=0.0, seed=0)
