"""Synthetic signal, noise generators and Monte-Carlo experiments."""

from .signal import signal_mu
from .noise import gen_noise, gen_noise_stack, kernel, noise_sigma, pre_field
from .experiments import (
    CdfComparison,
    cdf_comparison,
    coverage_experiment,
    load_experiment_config,
    write_report_csv,
)

__all__ = [
    "signal_mu", "gen_noise", "gen_noise_stack", "kernel", "noise_sigma", "pre_field",
    "CdfComparison", "cdf_comparison", "coverage_experiment", "load_experiment_config", "write_report_csv",
]
