"""Utilities package."""

from .logging import setup_logging
from .rng import multiplier_block, replicate_generator, trial_generator, trial_seed

__all__ = [
    "setup_logging",
    "multiplier_block",
    "replicate_generator",
    "trial_generator",
    "trial_seed",
]
