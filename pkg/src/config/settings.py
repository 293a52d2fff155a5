"""copeset settings: Pydantic BaseSettings driven by environment variables."""

from typing import Literal
from pydantic_settings import BaseSettings, SettingsConfigDict


class CopeSettings(BaseSettings):
    """
    All copeset configuration.
    Values are loaded from environment variables prefixed with COPE_,
    falling back to a .env file in the working directory.
    """

    # ===== Analysis =====
    LEVEL: float = 2.0
    """Target level c of the excursion set."""

    ALPHA: float = 0.1
    """Nominal non-coverage; CoPE sets hold with probability about 1 - ALPHA."""

    # ===== Bootstrap =====
    BOOT_REPS: int = 1000
    """Multiplier-bootstrap replicates M for analyses."""

    VALIDATION_BOOT_REPS: int = 5000
    """Replicates used by validation runs (cdf comparison)."""

    MIN_BOOT_REPS: int = 100
    """A warning is logged when M is below this."""

    BOOT_BLOCK: int = 256
    """Replicates evaluated per matrix block."""

    SEED: int = 0
    """Master seed; replicate m draws from the counter-based stream (SEED, m)."""

    # ===== Boundary =====
    BOUNDARY_MODE: Literal["plugin", "domain"] = "plugin"
    """Region for the supremum: plug-in contour of b̂ or all of S."""

    BOUNDARY_DISCRETIZATION: Literal["interpolated", "adjacent"] = "interpolated"
    """Marching-squares points, or all cells touching a crossing edge."""

    EMPTY_BOUNDARY_FALLBACK: bool = True
    """Fall back to the whole domain when the plug-in contour is empty."""

    # ===== Variance =====
    SIGMA_FLOOR_REL: float = 1e-12
    """Cells with σ̂ at or below this fraction of the median σ̂ are flagged."""

    SIGMA_POLICY: Literal["exclude", "strict"] = "exclude"
    """exclude: flagged cells leave contours and suprema; strict: raise."""

    VARIANCE_DIVISOR: Literal["n", "unbiased"] = "n"
    """σ̂² divisor: n, or n - p."""

    MIN_RCOND: float = 1e-12
    """Smallest acceptable reciprocal condition number of XᵀX."""

    # ===== Output =====
    VERBOSE: bool = False
    """Enable verbose logging output."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="COPE_",
        case_sensitive=False,
        extra="ignore",
    )


# Singleton instance, import this everywhere
settings = CopeSettings()
