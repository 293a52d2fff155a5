"""Tests for the simulation signal, noise generators and experiments."""

import numpy as np
import pytest

from src.core.grid import excursion_set, extract_boundary
from src.errors import ConfigError, IngestionError
from src.models.reports import ExperimentConfig, NoiseSpec
from src.simlab.experiments import (
    cdf_comparison,
    coverage_experiment,
    load_experiment_config,
    write_report_csv,
)
from src.simlab.noise import gen_noise, kernel, noise_geometry, noise_sigma, pre_field, smooth
from src.simlab.signal import DEFAULT_LEVEL, default_geometry, signal_mu


class TestSignal:
    def test_level_is_attained_inside_the_range(self):
        mu = signal_mu()
        assert mu.values.max() > DEFAULT_LEVEL > mu.values.min()
        assert (mu.values >= 0).all()

    def test_excursion_matches_pointwise_scan(self):
        mu = signal_mu()
        g = default_geometry()
        count = sum(
            1
            for i, y in enumerate(g.y_coords())
            for j, x in enumerate(g.x_coords())
            if mu.values[i, j] >= DEFAULT_LEVEL
        )
        region = excursion_set(mu, DEFAULT_LEVEL)
        assert region.count == count
        assert 0 < region.count < g.size

    def test_contour_is_closed(self):
        contour = extract_boundary(signal_mu(), DEFAULT_LEVEL)
        counts = np.bincount(contour.segments.ravel(), minlength=len(contour))
        assert (counts == 2).all()


class TestNoise:
    def test_default_scalings(self):
        assert NoiseSpec(kind="noise1").scaling == 50
        assert NoiseSpec(kind="noise2").scaling == 100
        assert NoiseSpec(kind="noise3").scaling == 25
        assert NoiseSpec(kind="noise2").kernel == "laplace"

    def test_pixels_must_split_into_blocks(self):
        with pytest.raises(ValueError):
            NoiseSpec(pixels=20)

    def test_kernels_are_normalized(self):
        for kind in ("noise1", "noise2"):
            k = kernel(NoiseSpec(kind=kind))
            assert k.sum() == pytest.approx(1.0)
            assert np.allclose(k, k.T) and np.allclose(k, k[::-1, ::-1])
        assert not np.allclose(kernel(NoiseSpec(kind="noise1")), kernel(NoiseSpec(kind="noise2")))

    def test_noise1_prefield(self):
        spec = NoiseSpec(kind="noise1")
        pre = pre_field(spec, np.random.default_rng(0), 50)
        lower, upper = pre[:, :32, :], pre[:, 32:, :]
        assert np.all(lower[:, :4, :4] == lower[:, :1, :1])
        assert upper.var() == pytest.approx(1.0, abs=0.05)
        assert lower.var() == pytest.approx(1.0, abs=0.08)

    def test_noise3_prefield_variances(self):
        pre = pre_field(NoiseSpec(kind="noise3"), np.random.default_rng(1), 50)
        assert pre[:, 32:, :].var() == pytest.approx(2.0, abs=0.1)
        assert pre[:, :32, :].var() == pytest.approx(10 / 8, abs=0.06)

    def test_smoothing_preserves_constants(self):
        spec = NoiseSpec(kind="noise2")
        out = smooth(np.full((2, 64, 64), 3.0), kernel(spec))
        assert out.shape == (2, 64, 64)
        assert np.allclose(out, 3.0)

    def test_gen_noise_is_reproducible(self):
        spec = NoiseSpec(kind="noise1")
        a, b, c = gen_noise(spec, 5), gen_noise(spec, 5), gen_noise(spec, 6)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_noise_sigma(self):
        spec = NoiseSpec(kind="noise3", pixels=32)
        sigma = noise_sigma(spec, reps=60, seed=2)
        assert sigma.geometry == noise_geometry(spec)
        assert (sigma.values > 0).all()


@pytest.fixture
def tiny_config():
    return ExperimentConfig(noise=NoiseSpec(kind="noise1", pixels=32), n=8, M=30, trials=3, seed=4)


class TestCoverage:
    def test_infinite_threshold_always_covers(self, tiny_config):
        cfg = tiny_config.model_copy(update={"fixed_threshold": float("inf")})
        report = coverage_experiment(cfg)
        assert report.coverage_fraction == 1.0
        assert report.binomial_stderr == 0.0

    def test_report_shape(self, tiny_config):
        report = coverage_experiment(tiny_config)
        assert len(report.inclusion) == 3 == len(report.thresholds)
        assert 0.0 <= report.coverage_fraction <= 1.0
        assert all(a > 0 for a in report.thresholds)

    def test_true_boundary_mode(self, tiny_config):
        cfg = tiny_config.model_copy(update={"boundary_mode": "true", "discretization": "adjacent"})
        assert coverage_experiment(cfg).trials == 3

    def test_empty_plugin_contour_falls_back_to_domain(self, tiny_config, mocker):
        log = mocker.patch("src.simlab.experiments.logger")
        report = coverage_experiment(tiny_config.model_copy(update={"c": 50.0}))
        assert report.fallback_trials == 3
        messages = [call.args[0] for call in log.warning.call_args_list]
        assert sum("whole domain" in m for m in messages) == 3

    def test_no_fallback_on_a_visible_contour(self, tiny_config):
        assert coverage_experiment(tiny_config).fallback_trials == 0

    def test_csv_is_byte_identical_across_runs(self, tiny_config, tmp_path):
        first = write_report_csv([coverage_experiment(tiny_config)], tmp_path / "a.csv")
        second = write_report_csv([coverage_experiment(tiny_config)], tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()
        header, row = first.read_text().splitlines()
        assert header == "noise,n,boundary_mode,trials,coverage,stderr,mean_a,wall_seconds"
        assert row.endswith(",")

    def test_record_timing_fills_wall_seconds(self, tiny_config, tmp_path):
        path = write_report_csv([coverage_experiment(tiny_config)], tmp_path / "t.csv", record_timing=True)
        assert not path.read_text().splitlines()[1].endswith(",")


class TestConfigFile:
    def test_load_with_overrides(self, tmp_path):
        path = tmp_path / "exp.env"
        path.write_text("NOISE=3\nN=120\nTRIALS=5\nBOUNDARY=true\nSEED=9\n")
        cfg = load_experiment_config(path, n=240)
        assert cfg.noise.kind == "noise3"
        assert cfg.n == 240
        assert cfg.trials == 5
        assert cfg.boundary_mode == "true"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "exp.env"
        path.write_text("NOSIE=1\n")
        with pytest.raises(ConfigError):
            load_experiment_config(path)

    def test_invalid_value(self, tmp_path):
        path = tmp_path / "exp.env"
        path.write_text("N=1\n")
        with pytest.raises(ConfigError):
            load_experiment_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError):
            load_experiment_config(tmp_path / "nope.env")


def test_cdf_comparison_small():
    result = cdf_comparison(
        NoiseSpec(kind="noise1", pixels=32), n=[6, 12], M=60, direct_trials=80, seed=1, sigma_reps=80
    )
    assert set(result.ks) == {6, 12}
    assert all(0.0 <= v <= 1.0 for v in result.ks.values())
    for (_, source), frame in result.table.groupby(["n", "source"]):
        cdf = frame["cdf"].to_numpy()
        assert (np.diff(cdf) >= 0).all()
        assert cdf[-1] == 1.0


@pytest.mark.slow
def test_cdf_bootstrap_tracks_direct_simulation():
    result = cdf_comparison(NoiseSpec(kind="noise1"), n=60, M=5000, direct_trials=10_000, seed=0)
    assert result.ks[60] <= 0.05


@pytest.fixture(scope="module")
def coverage_runs():
    """1000-trial coverage runs, computed once per (noise, n, boundary)."""
    cache = {}

    def run(kind: str, n: int, boundary: str = "plugin"):
        key = (kind, n, boundary)
        if key not in cache:
            config = ExperimentConfig(
                noise=NoiseSpec(kind=kind), n=n, M=1000, trials=1000, boundary_mode=boundary, seed=2024
            )
            cache[key] = coverage_experiment(config)
        return cache[key]

    return run


@pytest.mark.slow
class TestCoverageTable:
    def test_noise1_plugin_window(self, coverage_runs):
        assert 0.82 <= coverage_runs("noise1", 60).coverage_fraction <= 0.91

    def test_noise3_plugin_window(self, coverage_runs):
        assert 0.86 <= coverage_runs("noise3", 240).coverage_fraction <= 0.93

    @pytest.mark.parametrize("kind", ["noise1", "noise2", "noise3"])
    def test_coverage_does_not_drop_with_n(self, coverage_runs, kind):
        small, large = coverage_runs(kind, 60), coverage_runs(kind, 240)
        assert large.coverage_fraction >= small.coverage_fraction - 2 * small.binomial_stderr

    def test_true_and_plugin_boundary_agree(self, coverage_runs):
        plugin, true = coverage_runs("noise1", 60), coverage_runs("noise1", 60, "true")
        pooled = np.hypot(plugin.binomial_stderr, true.binomial_stderr)
        assert abs(plugin.coverage_fraction - true.coverage_fraction) <= 3 * pooled
