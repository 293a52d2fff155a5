"""Data models package."""

from .reports import (
    AnalysisSummary,
    CoverageReport,
    ExperimentConfig,
    InclusionReport,
    NoiseSpec,
    Provenance,
)

__all__ = [
    "AnalysisSummary",
    "CoverageReport",
    "ExperimentConfig",
    "InclusionReport",
    "NoiseSpec",
    "Provenance",
]
