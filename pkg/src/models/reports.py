"""Data models for copeset reports, provenance and experiment configuration."""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, computed_field, model_validator

NoiseKind = Literal["noise1", "noise2", "noise3"]

_NOISE_SCALING = {"noise1": 50.0, "noise2": 100.0, "noise3": 25.0}
_NOISE_KERNEL = {"noise1": "gaussian", "noise2": "laplace", "noise3": "gaussian"}


class Provenance(BaseModel):
    """Everything needed to reproduce a set of CoPE sets."""

    seed: int
    M: int = Field(description="Bootstrap replicates")
    alpha: float
    level: float = Field(description="Target level c")
    boundary_mode: str = Field(description="plugin | domain | true")
    discretization: str = Field(default="interpolated", description="interpolated | adjacent")
    sigma_policy: str = Field(default="exclude")
    variance_divisor: str = Field(default="n")
    block: int = Field(default=256)
    fallback_engaged: bool = Field(default=False, description="Empty contour replaced by all of S")
    flagged_cells: int = Field(default=0, description="Cells below the σ̂ floor")
    extra: Dict[str, str] = Field(default_factory=dict, description="Free-form notes (signal parameters, time shifts)")


class InclusionReport(BaseModel):
    """Whether Â⁺ ⊆ A ⊆ Â⁻ held for one realization."""

    upper_ok: bool = Field(description="Â⁺ ⊆ A")
    lower_ok: bool = Field(description="A ⊆ Â⁻")

    @computed_field
    @property
    def both_ok(self) -> bool:
        return self.upper_ok and self.lower_ok


class NoiseSpec(BaseModel):
    """One of the three simulation noise fields on a square domain."""

    kind: NoiseKind = "noise1"
    pixels: int = Field(default=64, ge=8)
    extent: float = Field(default=10.0, gt=0.0, description="Side length of S in domain units")
    bandwidth: float = Field(default=1.0, gt=0.0, description="Kernel bandwidth h in domain units")
    truncation: float = Field(default=4.0, gt=0.0, description="Kernel support radius in multiples of h")
    scaling: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _default_scaling(self) -> "NoiseSpec":
        if self.scaling is None:
            self.scaling = _NOISE_SCALING[self.kind]
        if self.pixels % 8:
            raise ValueError("pixels must be a multiple of 8 (two halves of 4x4 blocks)")
        return self

    @property
    def kernel(self) -> str:
        return _NOISE_KERNEL[self.kind]


class ExperimentConfig(BaseModel):
    """One cell of the coverage table."""

    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    n: int = Field(default=60, ge=2)
    c: float = Field(default=4.0 / 3.0)
    alpha: float = Field(default=0.1, gt=0.0, lt=1.0)
    M: int = Field(default=1000, ge=1)
    trials: int = Field(default=1000, ge=1)
    boundary_mode: Literal["true", "plugin"] = "plugin"
    discretization: Literal["interpolated", "adjacent"] = "interpolated"
    seed: int = 0
    block: int = Field(default=256, ge=1)
    fixed_threshold: Optional[float] = Field(default=None, ge=0.0, description="Skip the bootstrap and use this a")


class CoverageReport(BaseModel):
    """Monte-Carlo coverage of Â⁺ ⊆ A ⊆ Â⁻ over many trials."""

    noise: NoiseKind
    n: int
    boundary_mode: str
    trials: int
    inclusion: List[bool] = Field(default_factory=list, description="Per-trial both_ok")
    contour_inclusion: List[bool] = Field(default_factory=list, description="Per-trial ∂A ⊆ band")
    thresholds: List[float] = Field(default_factory=list)
    wall_seconds: float = 0.0
    trial_seconds_mean: float = 0.0
    trial_seconds_max: float = 0.0
    fallback_trials: int = Field(default=0, description="Trials whose plug-in contour was empty")
    provenance: Optional[Provenance] = None

    @computed_field
    @property
    def coverage_fraction(self) -> float:
        return sum(self.inclusion) / len(self.inclusion) if self.inclusion else 0.0

    @computed_field
    @property
    def binomial_stderr(self) -> float:
        p = self.coverage_fraction
        return (p * (1.0 - p) / self.trials) ** 0.5

    @property
    def contour_coverage(self) -> float:
        return sum(self.contour_inclusion) / len(self.contour_inclusion) if self.contour_inclusion else 0.0

    @property
    def mean_a(self) -> float:
        return sum(self.thresholds) / len(self.thresholds) if self.thresholds else 0.0

    def to_row(self, record_timing: bool = False) -> dict:
        """One CSV row; wall time is left blank unless requested so reruns are byte-identical."""
        return {
            "noise": self.noise,
            "n": self.n,
            "boundary_mode": self.boundary_mode,
            "trials": self.trials,
            "coverage": round(self.coverage_fraction, 6),
            "stderr": round(self.binomial_stderr, 6),
            "mean_a": round(self.mean_a, 6),
            "wall_seconds": round(self.wall_seconds, 3) if record_timing else None,
        }


class AnalysisSummary(BaseModel):
    """Final summary of one analyze run."""

    input_path: str
    n: int
    level: float
    alpha: float
    a: float
    order_index: int
    region_descriptor: str
    region_size: int
    upper_cells: int
    point_cells: int
    lower_cells: int
    band_cells: int
    provenance: Provenance
    sup_quantiles: Dict[str, float] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)

    def to_row(self) -> dict:
        return {
            "level": self.level,
            "alpha": self.alpha,
            "a": self.a,
            "M": self.provenance.M,
            "seed": self.provenance.seed,
            "boundary_mode": self.provenance.boundary_mode,
            "region": self.region_descriptor,
            "upper_cells": self.upper_cells,
            "point_cells": self.point_cells,
            "lower_cells": self.lower_cells,
            "band_cells": self.band_cells,
        }

    def to_markdown(self) -> str:
        """Markdown summary of the analysis for console display."""
        p = self.provenance
        lines = ["# CoPE analysis\n"]

        lines.append("## Input")
        lines.append(f"- `{self.input_path}` ({self.n} layers)")
        lines.append(f"- level c = {self.level:g}, 1 - α = {1 - self.alpha:g}")
        lines.append("")

        lines.append("## Threshold")
        lines.append(f"- a = {self.a:.4f} (order statistic {self.order_index} of {p.M})")
        lines.append(f"- region: {self.region_descriptor} ({self.region_size} points), seed {p.seed}")
        if p.fallback_engaged:
            lines.append("- plug-in contour was empty: supremum taken over all of S")
        lines.append("")

        lines.append("## CoPE sets")
        lines.append(f"- Â⁺ (red): {self.upper_cells} cells")
        lines.append(f"- Â (purple): {self.point_cells} cells")
        lines.append(f"- Â⁻ (green): {self.lower_cells} cells")
        lines.append(f"- contour band: {self.band_cells} cells")
        if p.flagged_cells:
            lines.append(f"- {p.flagged_cells} cell(s) below the σ̂ floor")
        lines.append("")

        if self.outputs:
            lines.append("## Outputs")
            for kind, path in self.outputs.items():
                lines.append(f"- {kind}: `{path}`")
            lines.append("")

        if self.warnings:
            lines.append("## Warnings")
            for w in self.warnings:
                lines.append(f"- {w}")
            lines.append("")

        return "\n".join(lines)
