"""In-process invariant suite behind ``copeset selftest``."""

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from loguru import logger

from src.climate.design import build_two_period_design, equally_spaced_times
from src.climate.stackfile import read_stack, write_stack
from src.core.bootstrap import (
    Threshold,
    bootstrap_realization,
    sample_covariance,
    sup_distribution,
    sup_distribution_blocked,
    threshold,
)
from src.core.cope import cope_sets
from src.core.glm import build_design, fit
from src.core.grid import FieldStack, GridGeometry, RegionMask, ScalarField
from src.models.reports import NoiseSpec
from src.simlab.noise import gen_noise
from src.utils.rng import multiplier_block


class CheckFailed(AssertionError):
    """A selftest invariant did not hold."""


def _require(condition, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def check_nesting(trials: int = 1000) -> str:
    rng = np.random.default_rng(1)
    for _ in range(trials):
        ny, nx = rng.integers(2, 12, size=2)
        g = GridGeometry(nx=int(nx), ny=int(ny))
        dev = ScalarField(g, rng.normal(scale=3.0, size=(ny, nx)))
        a = Threshold(a=float(rng.exponential(2.0)), alpha=0.1, order_index=1)
        r = cope_sets(dev, a)
        _require(r.upper.issubset(r.point_estimate) and r.point_estimate.issubset(r.lower), f"sets not nested at a={a.a:.3f}")
    return f"{trials} random configurations nested"


def check_bootstrap_covariance(reps: int = 200_000) -> str:
    rng = np.random.default_rng(2)
    g = GridGeometry(nx=3, ny=3)
    raw = rng.normal(size=(5, 3, 3))
    residuals = FieldStack(g, raw / np.sqrt((raw**2).mean(axis=0)))
    V = multiplier_block(3, 0, reps, 5)
    one = bootstrap_realization(residuals, V[:, 0])
    draws = V.T @ residuals.flat() / np.sqrt(5)
    _require(np.allclose(one.values.ravel(), draws[0]), "realization disagrees with the multiplier block")
    empirical = draws.T @ draws / reps
    cells = [(i, j) for i in range(3) for j in range(3)]
    expected = np.array([[sample_covariance(residuals, s, t) for t in cells] for s in cells])
    err = float(np.abs(empirical - expected).max())
    _require(err <= 0.02, f"max covariance error {err:.4f} over 81 pairs")
    return f"max covariance error {err:.4f}"


def check_two_period_constants() -> str:
    for n in (4, 58, 200):
        k = n // 2
        d = build_two_period_design(k, k, equally_spaced_times(k), equally_spaced_times(k))
        _require(abs(d.spec.scale - 2.0 / np.sqrt(n)) < 1e-10, f"scale off at n={n}")
        _require(abs(np.linalg.norm(d.spec.v) - 1.0) < 1e-10, f"‖v‖ off at n={n}")
    return "scale = 2/√n and ‖v‖₂ = 1 for n ∈ {4, 58, 200}"


def check_orthogonality() -> str:
    rng = np.random.default_rng(4)
    g = GridGeometry(nx=64, ny=64)
    X = np.column_stack([np.ones(240), rng.normal(size=(240, 3))])
    stack = FieldStack(g, rng.normal(size=(240, 64, 64)))
    res = fit(stack, build_design(X))
    XtR = np.abs(X.T @ res.residuals.flat()).max()
    scale = np.abs(stack.values).max() * np.abs(X).max() * 240
    _require(XtR <= 1e-8 * scale, f"‖XᵀR‖∞ = {XtR:.3e}")
    return f"max ‖XᵀR‖∞ = {XtR:.2e}"


def check_block_invariance() -> str:
    rng = np.random.default_rng(5)
    g = GridGeometry(nx=8, ny=8)
    residuals = FieldStack(g, rng.normal(size=(12, 8, 8)))
    region = RegionMask.full(g)
    ref = sup_distribution(residuals, region, 64, seed=11, min_reps=0).values
    for block in (1, 7, 64, 500):
        got = sup_distribution_blocked(residuals, region, 64, seed=11, block=block, min_reps=0).values
        _require(np.array_equal(ref, got), f"block={block} differs")
    return "suprema identical for block sizes 1, 7, 64, 500"


def check_threshold_monotone() -> str:
    rng = np.random.default_rng(6)
    g = GridGeometry(nx=6, ny=6)
    residuals = FieldStack(g, rng.normal(size=(20, 6, 6)))
    sample = sup_distribution(residuals, RegionMask.full(g), 200, seed=1, min_reps=0)
    _require(threshold(sample, 0.5).a <= threshold(sample, 0.1).a, "a(0.5) > a(0.1)")
    return "a(0.5) ≤ a(0.1)"


def check_stack_roundtrip() -> str:
    rng = np.random.default_rng(7)
    g = GridGeometry(nx=5, ny=4, spacing_x=0.5, spacing_y=0.25, origin_x=-3.0, origin_y=1.0)
    mask = np.ones((4, 5), dtype=bool)
    mask[0, 0] = False
    stack = FieldStack(g, rng.normal(size=(3, 4, 5)), mask)
    with tempfile.TemporaryDirectory() as tmp:
        back = read_stack(write_stack(Path(tmp) / "s.cope", stack))
    _require(back.geometry == g and np.array_equal(back.valid, mask), "geometry or mask changed")
    _require(np.array_equal(back.values[:, mask], stack.values[:, mask]), "values changed")
    return "write → read is bit-identical"


def check_noise_reproducible() -> str:
    spec = NoiseSpec(kind="noise3")
    _require(np.array_equal(gen_noise(spec, 9).values, gen_noise(spec, 9).values), "same seed gave different fields")
    return "same seed, same bits"


CHECKS: dict[str, Callable[[], str]] = {
    "nesting": check_nesting,
    "bootstrap covariance": check_bootstrap_covariance,
    "two-period constants": check_two_period_constants,
    "glm orthogonality": check_orthogonality,
    "block invariance": check_block_invariance,
    "threshold monotone in alpha": check_threshold_monotone,
    "stack file round trip": check_stack_roundtrip,
    "noise reproducibility": check_noise_reproducible,
}


def run_selftest(names: list[str] | None = None) -> list[CheckResult]:
    """Run the named checks (all by default); failures are collected, not raised."""
    results = []
    for name, check in CHECKS.items():
        if names and name not in names:
            continue
        start = time.perf_counter()
        try:
            detail, passed = check(), True
        except AssertionError as exc:
            detail, passed = str(exc) or "assertion failed", False
        except Exception as exc:
            detail, passed = f"{type(exc).__name__}: {exc}", False
        results.append(CheckResult(name, passed, detail, time.perf_counter() - start))
        logger.debug("selftest {}: {} ({})", name, "pass" if passed else "FAIL", detail)
    return results
