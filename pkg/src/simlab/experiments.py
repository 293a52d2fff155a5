"""
Monte-Carlo harnesses: coverage of the CoPE inclusion over many trials, and
the bootstrap-versus-direct cdf comparison of sup |ε/σ| on the true contour.

Every trial draws from its own stream derived from (seed, trial), so results
do not depend on evaluation order and reruns are bit-identical.
"""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from loguru import logger
from pydantic import ValidationError
from scipy import stats

from src.core.bootstrap import SupSample, Threshold, degenerate_sample, empirical_cdf, sup_distribution_blocked, threshold
from src.core.cope import CopeResult, cope_sets, plugin_region, verify_contour_inclusion, verify_inclusion
from src.core.glm import DesignSpec, FitResult, build_design, fit, standardized_deviation
from src.core.grid import (
    ContourSet,
    FieldStack,
    RegionMask,
    ScalarField,
    boundary_cells,
    excursion_set,
    extract_boundary,
    interpolate_stack,
)
from src.errors import ConfigError, IngestionError
from src.models.reports import CoverageReport, ExperimentConfig, NoiseSpec, Provenance
from src.simlab.noise import gen_noise_stack, noise_geometry, noise_sigma
from src.simlab.signal import signal_mu, signal_provenance
from src.utils.rng import trial_generator, trial_seed

# Stream ids under trial_generator: noise draws, then the MC σ estimate.
_NOISE_STREAM = 0
_SIGMA_STREAM = 2


@dataclass(frozen=True)
class TrialOutcome:
    upper_ok: bool
    lower_ok: bool
    contour_ok: bool
    a: float
    seconds: float
    fallback: bool
    result: CopeResult
    fit: FitResult

    @property
    def both_ok(self) -> bool:
        return self.upper_ok and self.lower_ok


def simulate_sample(mu: ScalarField, spec: NoiseSpec, n: int, rng: np.random.Generator) -> FieldStack:
    """n observations y_j = μ + ε_j."""
    eps = gen_noise_stack(spec, rng, n)
    return FieldStack(mu.geometry, mu.values[None, :, :] + eps)


def _region_is_empty(region) -> bool:
    return region.is_empty if isinstance(region, ContourSet) else region.count == 0


def run_trial(
    config: ExperimentConfig,
    mu: ScalarField,
    truth: RegionMask,
    truth_region,
    truth_contour: ContourSet,
    design: DesignSpec,
    trial: int,
) -> TrialOutcome:
    """One simulate → fit → bootstrap → CoPE → inclusion check cycle."""
    start = time.perf_counter()
    rng = trial_generator(config.seed, trial, _NOISE_STREAM)
    stack = simulate_sample(mu, config.noise, config.n, rng)
    fitres = fit(stack, design)
    dev = standardized_deviation(fitres, design, config.c)

    fallback = False
    if config.fixed_threshold is not None:
        a = Threshold(a=config.fixed_threshold, alpha=config.alpha, order_index=config.M)
        sample: Optional[SupSample] = None
    else:
        seed = trial_seed(config.seed, trial)
        region = truth_region if config.boundary_mode == "true" else plugin_region(fitres, config.c, config.discretization)
        if _region_is_empty(region):
            logger.warning("Trial {}: contour at c={} is empty; bootstrapping over the whole domain", trial, config.c)
            region = RegionMask(mu.geometry, fitres.usable)
            fallback = True
        if isinstance(region, RegionMask) and region.count == 0:
            sample = degenerate_sample(fitres.normalized_residuals, config.M, seed, "whole-domain")
        else:
            sample = sup_distribution_blocked(
                fitres.normalized_residuals, region, config.M, seed, block=config.block, min_reps=0
            )
        a = threshold(sample, config.alpha)

    result = cope_sets(dev, a, config.c, sup_sample=sample)
    inc = verify_inclusion(result, truth)
    contour_ok = verify_contour_inclusion(result, truth_contour)
    return TrialOutcome(
        upper_ok=inc.upper_ok,
        lower_ok=inc.lower_ok,
        contour_ok=contour_ok,
        a=a.a,
        seconds=time.perf_counter() - start,
        fallback=fallback,
        result=result,
        fit=fitres,
    )


def coverage_experiment(config: ExperimentConfig, progress=None) -> CoverageReport:
    """
    Fraction of trials where Â⁺ ⊆ A_c(μ) ⊆ Â⁻ for the intercept-only model.

    Args:
        config: noise kind, sample size, level, boundary choice, seeds.
        progress: optional callable invoked with the trial index after each trial.
    """
    if config.M < 100 and config.fixed_threshold is None:
        logger.warning("M={} bootstrap replicates per trial is below the recommended 100", config.M)

    mu = signal_mu(noise_geometry(config.noise))
    truth = excursion_set(mu, config.c)
    truth_contour = extract_boundary(mu, config.c)
    truth_region = boundary_cells(mu, config.c) if config.discretization == "adjacent" else truth_contour
    design = build_design(np.ones((config.n, 1)))

    logger.info(
        "Coverage: {} n={} boundary={} trials={} M={}",
        config.noise.kind, config.n, config.boundary_mode, config.trials, config.M,
    )
    wall = time.perf_counter()
    inclusion, contour_inclusion, thresholds, seconds = [], [], [], []
    fallbacks = 0
    for t in range(config.trials):
        out = run_trial(config, mu, truth, truth_region, truth_contour, design, t)
        inclusion.append(out.both_ok)
        contour_inclusion.append(out.contour_ok)
        thresholds.append(out.a)
        seconds.append(out.seconds)
        fallbacks += out.fallback
        if progress is not None:
            progress(t)

    report = CoverageReport(
        noise=config.noise.kind,
        n=config.n,
        boundary_mode=config.boundary_mode,
        trials=config.trials,
        inclusion=inclusion,
        contour_inclusion=contour_inclusion,
        thresholds=thresholds,
        wall_seconds=time.perf_counter() - wall,
        trial_seconds_mean=float(np.mean(seconds)),
        trial_seconds_max=float(np.max(seconds)),
        fallback_trials=fallbacks,
        provenance=experiment_provenance(config),
    )
    logger.info(
        "Coverage {:.4f} ± {:.4f} (contour {:.4f}), mean a = {:.3f}",
        report.coverage_fraction, report.binomial_stderr, report.contour_coverage, report.mean_a,
    )
    return report


def experiment_provenance(config: ExperimentConfig) -> Provenance:
    extra = signal_provenance()
    extra["noise"] = config.noise.kind
    extra["noise_scaling"] = repr(config.noise.scaling)
    extra["noise_order"] = "smooth-then-scale"
    return Provenance(
        seed=config.seed,
        M=config.M,
        alpha=config.alpha,
        level=config.c,
        boundary_mode=config.boundary_mode,
        discretization=config.discretization,
        block=config.block,
        extra=extra,
    )


# ──────────────────────────── cdf comparison ────────────────────────────


@dataclass(frozen=True)
class CdfComparison:
    """Long-format cdf table (n, source, a, cdf) and the KS distance per n."""

    table: pd.DataFrame
    ks: dict[int, float]
    direct: np.ndarray
    bootstrap: dict[int, np.ndarray]


def direct_suprema(
    spec: NoiseSpec, contour: ContourSet, sigma: ScalarField, trials: int, seed: int, batch: int = 250
) -> np.ndarray:
    """sup over the contour of |ε/σ| for ``trials`` independent error fields."""
    out = np.empty(trials)
    geometry = contour.geometry
    done = 0
    k = 0
    while done < trials:
        m = min(batch, trials - done)
        eps = gen_noise_stack(spec, trial_generator(seed, k, _NOISE_STREAM), m)
        std = FieldStack(geometry, eps / sigma.values[None, :, :])
        out[done:done + m] = np.abs(interpolate_stack(std, contour)).max(axis=0)
        done += m
        k += 1
    return out


def bootstrap_suprema(
    spec: NoiseSpec, mu: ScalarField, contour: ContourSet, n: int, M: int, seed: int, block: int = 256
) -> np.ndarray:
    """Bootstrap suprema from a single size-n sample, on the true contour."""
    rng = trial_generator(seed, 1_000_000 + n, _NOISE_STREAM)
    stack = simulate_sample(mu, spec, n, rng)
    fitres = fit(stack, build_design(np.ones((n, 1))))
    sample = sup_distribution_blocked(
        fitres.normalized_residuals, contour, M, trial_seed(seed, n), block=block
    )
    return sample.values


def cdf_comparison(
    noise: NoiseSpec,
    n: Union[int, Iterable[int]] = 60,
    M: int = 5000,
    direct_trials: int = 10_000,
    seed: int = 0,
    c: float = 4.0 / 3.0,
    sigma_reps: int = 4000,
    grid_points: int = 200,
) -> CdfComparison:
    """Compare bootstrap and direct-simulation cdfs of the contour supremum."""
    sizes = [int(n)] if isinstance(n, (int, np.integer)) else [int(k) for k in n]
    if not sizes or min(sizes) < 2:
        raise ConfigError(f"sample sizes must be at least 2, got {sizes}")

    mu = signal_mu(noise_geometry(noise))
    contour = extract_boundary(mu, c)
    if contour.is_empty:
        raise ConfigError(f"level {c} does not cross the signal; no contour to compare on")

    logger.info("cdf comparison: {} n={} M={} direct={}", noise.kind, sizes, M, direct_trials)
    sigma = noise_sigma(noise, reps=sigma_reps, seed=int(trial_seed(seed, _SIGMA_STREAM) & 0xFFFFFFFF))
    direct = direct_suprema(noise, contour, sigma, direct_trials, seed)
    boot = {k: bootstrap_suprema(noise, mu, contour, k, M, seed) for k in sizes}

    top = max(direct.max(), max(v.max() for v in boot.values()))
    grid = np.linspace(0.0, top, grid_points)
    frames = [pd.DataFrame({"n": 0, "source": "direct", "a": grid, "cdf": empirical_cdf(direct, grid)})]
    ks = {}
    for k, values in boot.items():
        frames.append(pd.DataFrame({"n": k, "source": "bootstrap", "a": grid, "cdf": empirical_cdf(values, grid)}))
        ks[k] = float(stats.ks_2samp(direct, values).statistic)
        logger.info("n={}: KS distance {:.4f}", k, ks[k])

    return CdfComparison(table=pd.concat(frames, ignore_index=True), ks=ks, direct=direct, bootstrap=boot)


# ──────────────────────────── IO ────────────────────────────


_CONFIG_KEYS = {
    "NOISE": "noise", "N": "n", "C": "c", "ALPHA": "alpha", "M": "M", "BOOT_REPS": "M",
    "TRIALS": "trials", "BOUNDARY": "boundary_mode", "BOUNDARY_MODE": "boundary_mode",
    "DISCRETIZATION": "discretization", "SEED": "seed", "BLOCK": "block",
    "FIXED_THRESHOLD": "fixed_threshold",
}


def normalize_noise(value) -> str:
    text = str(value).strip().lower()
    return text if text.startswith("noise") else f"noise{text}"


def load_experiment_config(path: Union[str, Path], **overrides) -> ExperimentConfig:
    """
    Read a KEY=VALUE experiment file; keyword overrides win over file values.

    Recognized keys: NOISE, N, C, ALPHA, M (or BOOT_REPS), TRIALS, BOUNDARY,
    DISCRETIZATION, SEED, BLOCK, FIXED_THRESHOLD, PIXELS.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"experiment config {path} does not exist")
    raw = {k.upper(): v for k, v in dotenv_values(path).items() if v is not None}
    unknown = set(raw) - set(_CONFIG_KEYS) - {"PIXELS"}
    if unknown:
        raise ConfigError(f"unknown key(s) in {path}: {', '.join(sorted(unknown))}")

    fields = {_CONFIG_KEYS[k]: v for k, v in raw.items() if k in _CONFIG_KEYS}
    fields.update({k: v for k, v in overrides.items() if v is not None})
    noise = {"kind": normalize_noise(fields.pop("noise", "noise1"))}
    if "PIXELS" in raw:
        noise["pixels"] = raw["PIXELS"]
    try:
        return ExperimentConfig(noise=NoiseSpec(**noise), **fields)
    except ValidationError as exc:
        raise ConfigError(f"invalid experiment config {path}: {exc}") from exc


def write_report_csv(reports: list[CoverageReport], path: Union[str, Path], record_timing: bool = False) -> Path:
    """Coverage rows as CSV; wall_seconds stays blank unless ``record_timing``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([r.to_row(record_timing=record_timing) for r in reports])
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path
