"""copeset CLI: Typer-based command-line interface."""

from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markdown import Markdown
from rich.panel import Panel
from rich.table import Table

from src.errors import CopeError

app = typer.Typer(
    name="copeset",
    help="Coverage probability excursion (CoPE) sets for gridded data.",
    no_args_is_help=True,
)
console = Console()


class AnalyzeBoundary(str, Enum):
    plugin = "plugin"
    domain = "domain"


class SimulateBoundary(str, Enum):
    true = "true"
    plugin = "plugin"


class Discretization(str, Enum):
    interpolated = "interpolated"
    adjacent = "adjacent"


class NoiseChoice(str, Enum):
    one = "1"
    two = "2"
    three = "3"


@contextmanager
def _guard():
    """Map copeset errors to exit codes: validation → 2, numerical → 3."""
    try:
        yield
    except CopeError as exc:
        console.print(Panel.fit(str(exc), title=f"❌ {type(exc).__name__}", border_style="red"))
        raise typer.Exit(code=exc.exit_code)
    except ValidationError as exc:
        console.print(Panel.fit(str(exc), title="❌ Invalid parameters", border_style="red"))
        raise typer.Exit(code=2)


def _logging(verbose: bool) -> None:
    from src.utils.logging import setup_logging
    setup_logging(verbose or None)


@app.command()
def analyze(
    input: Path = typer.Option(..., "--input", "-i", help="GridStackFile with the observation layers."),
    covariates: Optional[Path] = typer.Option(None, "--covariates", help="Sidecar CSV (layer_index, period, time)."),
    level: Optional[float] = typer.Option(None, "--level", help="Target level c (default COPE_LEVEL)."),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Nominal non-coverage (default COPE_ALPHA)."),
    boot_reps: Optional[int] = typer.Option(None, "--boot-reps", help="Bootstrap replicates M."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed."),
    boundary: Optional[AnalyzeBoundary] = typer.Option(None, "--boundary", help="Region for the supremum."),
    discretization: Optional[Discretization] = typer.Option(None, "--discretization"),
    out_prefix: Optional[Path] = typer.Option(None, "--out-prefix", help="Write <prefix>.svg, _summary.json/.csv, _masks.cope."),
    no_figure: bool = typer.Option(False, "--no-figure", help="Skip the SVG figure."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose output."),
):
    """Run the full pipeline: ingest → fit → boundary → bootstrap → CoPE sets → outputs."""
    console.print(Panel.fit(
        "🗺️  [bold magenta]copeset[/bold magenta] analyze\n"
        f"📂 Input: {input}",
        border_style="magenta",
    ))
    _logging(verbose)

    from src.graph.workflow import run_analysis

    with _guard():
        result = run_analysis(
            input_path=str(input),
            covariates_path=str(covariates) if covariates else None,
            out_prefix=str(out_prefix) if out_prefix else None,
            level=level,
            alpha=alpha,
            boot_reps=boot_reps,
            seed=seed,
            boundary_mode=boundary.value if boundary else None,
            discretization=discretization.value if discretization else None,
            render=not no_figure,
            verbose=verbose or None,
        )

    console.print()
    console.print(Markdown(result.get("final_summary") or "No summary generated."))


@app.command()
def simulate(
    noise: Optional[NoiseChoice] = typer.Option(None, "--noise", help="Noise kind 1, 2 or 3 (default 1)."),
    n: Optional[List[int]] = typer.Option(None, "--n", help="Sample size (default 60); repeat for several rows."),
    trials: Optional[int] = typer.Option(None, "--trials"),
    boot_reps: Optional[int] = typer.Option(None, "--boot-reps"),
    boundary: Optional[SimulateBoundary] = typer.Option(None, "--boundary", help="true ∂A_c or plug-in ∂Â_c."),
    discretization: Optional[Discretization] = typer.Option(None, "--discretization"),
    alpha: Optional[float] = typer.Option(None, "--alpha"),
    level: Optional[float] = typer.Option(None, "--level", help="Level c (default 4/3)."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    fixed_threshold: Optional[float] = typer.Option(None, "--fixed-threshold", help="Skip the bootstrap and use this a."),
    config: Optional[Path] = typer.Option(None, "--config", help="KEY=VALUE experiment file; flags override it."),
    out: Path = typer.Option(Path("coverage.csv"), "--out", help="Report CSV."),
    figure: Optional[Path] = typer.Option(None, "--figure", help="Render trial 0 of the first row to this SVG."),
    record_timing: bool = typer.Option(False, "--record-timing", help="Fill the wall_seconds column."),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Monte-Carlo coverage of Â⁺ ⊆ A_c ⊆ Â⁻ for the simulation signal."""
    _logging(verbose)

    from src.models.reports import ExperimentConfig, NoiseSpec
    from src.simlab.experiments import coverage_experiment, load_experiment_config, write_report_csv

    with _guard():
        overrides = {
            "trials": trials, "M": boot_reps, "alpha": alpha, "c": level, "seed": seed,
            "fixed_threshold": fixed_threshold,
            "boundary_mode": boundary.value if boundary else None,
            "discretization": discretization.value if discretization else None,
        }
        reports = []
        for size in n or [None]:
            if config:
                cfg = load_experiment_config(config, n=size, noise=noise.value if noise else None, **overrides)
            else:
                fields = {k: v for k, v in overrides.items() if v is not None}
                kind = f"noise{noise.value}" if noise else "noise1"
                cfg = ExperimentConfig(noise=NoiseSpec(kind=kind), n=size or 60, **fields)
            console.print(f"[bold]🎲 {cfg.noise.kind}, n={cfg.n}, {cfg.trials} trials, boundary={cfg.boundary_mode}[/bold]")
            report = coverage_experiment(cfg)
            reports.append(report)
            console.print(
                f"   coverage {report.coverage_fraction:.4f} ± {report.binomial_stderr:.4f}, "
                f"contour {report.contour_coverage:.4f}, mean a {report.mean_a:.3f}"
            )
            if figure and len(reports) == 1:
                _simulation_figure(cfg, figure)

        path = write_report_csv(reports, out, record_timing=record_timing)
    console.print(f"\n✅ Report: {path}")


def _simulation_figure(cfg, path: Path) -> None:
    import numpy as np

    from src.climate.render import render
    from src.core.glm import build_design
    from src.core.grid import boundary_cells, excursion_set, extract_boundary
    from src.simlab.experiments import run_trial
    from src.simlab.noise import noise_geometry
    from src.simlab.signal import signal_mu

    mu = signal_mu(noise_geometry(cfg.noise))
    contour = extract_boundary(mu, cfg.c)
    region = boundary_cells(mu, cfg.c) if cfg.discretization == "adjacent" else contour
    out = run_trial(cfg, mu, excursion_set(mu, cfg.c), region, contour, build_design(np.ones((cfg.n, 1))), 0)
    render(out.result, out.fit.bhat[0], path, truth_contour=contour,
           title=f"{cfg.noise.kind}, n = {cfg.n}, a = {out.a:.3f}")
    console.print(f"🖼️  Figure: {path}")


@app.command()
def cdf(
    noise: NoiseChoice = typer.Option(NoiseChoice.one, "--noise"),
    n: List[int] = typer.Option([10, 30, 60], "--n", help="Bootstrap sample sizes."),
    boot_reps: Optional[int] = typer.Option(None, "--boot-reps", help="Default COPE_VALIDATION_BOOT_REPS."),
    direct_trials: int = typer.Option(10_000, "--direct-trials"),
    sigma_reps: int = typer.Option(4000, "--sigma-reps", help="Fields for the Monte-Carlo σ estimate."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    out: Path = typer.Option(Path("cdf.csv"), "--out"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Compare bootstrap and direct-simulation cdfs of sup |ε/σ| on the true contour."""
    _logging(verbose)

    from src.config import settings
    from src.models.reports import NoiseSpec
    from src.simlab.experiments import cdf_comparison

    with _guard():
        comparison = cdf_comparison(
            NoiseSpec(kind=f"noise{noise.value}"),
            n=n,
            M=boot_reps or settings.VALIDATION_BOOT_REPS,
            direct_trials=direct_trials,
            seed=settings.SEED if seed is None else seed,
            sigma_reps=sigma_reps,
        )
        out.parent.mkdir(parents=True, exist_ok=True)
        comparison.table.to_csv(out, index=False, float_format="%.6f", lineterminator="\n")

    table = Table(title="KS distance to direct simulation")
    table.add_column("n", justify="right")
    table.add_column("KS", justify="right")
    for size, ks in comparison.ks.items():
        table.add_row(str(size), f"{ks:.4f}")
    console.print(table)
    console.print(f"✅ cdf table: {out}")


@app.command("make-surrogate")
def make_surrogate(
    out_prefix: Path = typer.Option(Path("surrogate"), "--out-prefix"),
    nx: int = typer.Option(100, "--nx"),
    ny: int = typer.Option(100, "--ny"),
    n_a: int = typer.Option(29, "--n-a"),
    n_b: int = typer.Option(29, "--n-b"),
    difference: float = typer.Option(2.5, "--difference", help="Mean difference inside the disk."),
    noise_sd: float = typer.Option(0.5, "--noise-sd", help="0 writes exact data."),
    seed: int = typer.Option(0, "--seed"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Write a synthetic two-period stack with a known excursion set."""
    _logging(verbose)
    from src.climate.surrogate import make_surrogate as build

    with _guard():
        paths = build(out_prefix, nx=nx, ny=ny, n_a=n_a, n_b=n_b, difference=difference, noise_sd=noise_sd, seed=seed)
    console.print(f"✅ Stack: {paths.stack}\n   Covariates: {paths.covariates}\n   Truth: {paths.truth}")


@app.command()
def convert(
    csv_path: Path = typer.Argument(..., help="Long CSV with layer_index,row,col,value."),
    out: Path = typer.Option(..., "--out", "-o", help="GridStackFile to write."),
    spacing_x: float = typer.Option(1.0, "--spacing-x"),
    spacing_y: float = typer.Option(1.0, "--spacing-y"),
    origin_x: float = typer.Option(0.0, "--origin-x"),
    origin_y: float = typer.Option(0.0, "--origin-y"),
):
    """Convert a CSV of grids into a GridStackFile."""
    _logging(False)
    from src.climate.stackfile import convert_csv_grids

    with _guard():
        stack = convert_csv_grids(csv_path, out, (spacing_x, spacing_y), (origin_x, origin_y))
    console.print(f"✅ {stack.n} layers of {stack.geometry.ny}x{stack.geometry.nx} → {out}")


@app.command()
def selftest(
    check: Optional[List[str]] = typer.Option(None, "--check", help="Run only the named check(s)."),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Run the invariant suite and report pass counts."""
    _logging(verbose)
    from src.selftest import run_selftest

    results = run_selftest(check)
    table = Table(title="copeset selftest")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    table.add_column("seconds", justify="right")
    for r in results:
        table.add_row(r.name, "✅" if r.passed else "❌", r.detail, f"{r.seconds:.2f}")
    console.print(table)

    passed = sum(r.passed for r in results)
    console.print(f"\n{passed}/{len(results)} checks passed")
    if passed != len(results):
        raise typer.Exit(code=1)


@app.command()
def status():
    """Show copeset configuration."""
    from src.config import settings

    console.print(Panel.fit(
        f"[bold]Level c:[/bold] {settings.LEVEL}\n"
        f"[bold]Alpha:[/bold] {settings.ALPHA}\n"
        f"[bold]Bootstrap reps:[/bold] {settings.BOOT_REPS} (validation {settings.VALIDATION_BOOT_REPS})\n"
        f"[bold]Block size:[/bold] {settings.BOOT_BLOCK}\n"
        f"[bold]Seed:[/bold] {settings.SEED}\n"
        f"[bold]Boundary:[/bold] {settings.BOUNDARY_MODE} / {settings.BOUNDARY_DISCRETIZATION}\n"
        f"[bold]Empty-boundary fallback:[/bold] {settings.EMPTY_BOUNDARY_FALLBACK}\n"
        f"[bold]σ̂ floor:[/bold] {settings.SIGMA_FLOOR_REL} ({settings.SIGMA_POLICY})\n"
        f"[bold]Variance divisor:[/bold] {settings.VARIANCE_DIVISOR}\n"
        f"[bold]Verbose:[/bold] {settings.VERBOSE}",
        title="🗺️  copeset config",
        border_style="magenta",
    ))


if __name__ == "__main__":
    app()
