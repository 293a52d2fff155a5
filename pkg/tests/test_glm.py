"""Tests for the per-cell least-squares fit and standardization."""

import numpy as np
import pytest

from src.core.glm import build_design, fit, standardized_deviation
from src.core.grid import FieldStack, GridGeometry
from src.errors import ConfigError, DegenerateVarianceError, DesignError, GeometryError


class TestBuildDesign:
    def test_intercept_only_constants(self):
        d = build_design(np.ones((60, 1)))
        assert d.pi_n == pytest.approx(1 / 60)
        assert d.scale == pytest.approx(1 / np.sqrt(60))
        assert np.linalg.norm(d.v) == pytest.approx(1.0, abs=1e-12)

    def test_v_has_unit_norm_for_any_design(self, rng):
        X = np.column_stack([np.ones(30), rng.normal(size=(30, 2))])
        for k in (1, 2, 3):
            d = build_design(X, coef_index=k)
            assert np.linalg.norm(d.v) == pytest.approx(1.0, abs=1e-10)
            assert d.scale == pytest.approx(np.sqrt(np.linalg.inv(X.T @ X)[k - 1, k - 1]))

    def test_two_by_two_by_hand(self):
        # (XᵀX)⁻¹ = [[5, -3], [-3, 3]] / 6
        d = build_design(np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]), coef_index=2)
        assert d.pi_n == pytest.approx(0.5)
        assert d.scale == pytest.approx(np.sqrt(0.5))

    def test_too_few_rows(self):
        with pytest.raises(DesignError):
            build_design(np.array([[1.0, 0.0, 2.0]]))

    def test_square_design_is_accepted(self):
        d = build_design(np.array([[1.0, 0.0], [1.0, 1.0]]), coef_index=2)
        assert d.pi_n == pytest.approx(2.0)

    def test_collinear_columns(self):
        X = np.column_stack([np.ones(10), np.ones(10)])
        with pytest.raises(DesignError) as info:
            build_design(X)
        assert info.value.rcond is not None

    def test_bad_coefficient_index(self):
        with pytest.raises(ConfigError):
            build_design(np.ones((5, 1)), coef_index=2)


class TestFit:
    def test_intercept_fit_is_the_mean(self, residual_stack):
        d = build_design(np.ones((residual_stack.n, 1)))
        res = fit(residual_stack, d)
        assert np.allclose(res.bhat[0].values, residual_stack.values.mean(axis=0))
        assert np.allclose(res.sigma_hat.values, residual_stack.values.std(axis=0))

    def test_hand_solved_cell(self):
        g = GridGeometry(nx=2, ny=2)
        layers = np.array([[1.0, 0.0, 2.0, 4.0], [2.0, 1.0, 0.0, 4.0], [3.0, 5.0, 1.0, 1.0]])
        stack = FieldStack(g, layers)
        res = fit(stack, build_design(np.ones((3, 1))))
        assert res.bhat[0].values[0, 0] == pytest.approx(2.0)
        assert res.residuals.values[:, 0, 0] == pytest.approx([-1.0, 0.0, 1.0])
        assert res.sigma_hat.values[0, 0] ** 2 == pytest.approx(2 / 3)

    def test_unbiased_divisor(self, residual_stack):
        d = build_design(np.ones((residual_stack.n, 1)))
        res = fit(residual_stack, d, variance_divisor="unbiased")
        assert res.divisor == residual_stack.n - 1
        assert np.allclose(res.sigma_hat.values, residual_stack.values.std(axis=0, ddof=1))

    def test_residuals_orthogonal_to_design(self, rng):
        g = GridGeometry(nx=64, ny=64)
        X = np.column_stack([np.ones(240), rng.normal(size=(240, 3))])
        stack = FieldStack(g, rng.normal(size=(240, 64, 64)))
        res = fit(stack, build_design(X))
        assert np.abs(X.T @ res.residuals.flat()).max() < 1e-8 * 240

    def test_normalized_residuals_have_unit_mean_square(self, residual_stack):
        d = build_design(np.ones((residual_stack.n, 1)))
        res = fit(residual_stack, d)
        ms = (res.normalized_residuals.values**2).mean(axis=0)
        assert np.allclose(ms, 1.0)

    def test_no_residual_degrees_of_freedom(self, residual_stack):
        square = build_design(np.column_stack([np.ones(2), [0.0, 1.0]]))
        with pytest.raises(DesignError):
            fit(FieldStack(residual_stack.geometry, residual_stack.values[:2]), square)

    def test_layer_count_must_match(self, residual_stack):
        with pytest.raises(GeometryError):
            fit(residual_stack, build_design(np.ones((residual_stack.n + 1, 1))))

    def test_masked_cells_are_nan(self, rng):
        g = GridGeometry(nx=3, ny=3)
        mask = np.ones((3, 3), dtype=bool)
        mask[1, 1] = False
        stack = FieldStack(g, rng.normal(size=(6, 3, 3)), mask)
        res = fit(stack, build_design(np.ones((6, 1))))
        assert np.isnan(res.bhat[0].values[1, 1])
        assert not res.normalized_residuals.valid[1, 1]


class TestSigmaFloor:
    @pytest.fixture
    def flat_cell_stack(self, rng):
        g = GridGeometry(nx=4, ny=4)
        values = rng.normal(size=(10, 4, 4))
        values[:, 0, 0] = 3.0
        values[:, 0, 1] = -1.0
        return FieldStack(g, values)

    def test_flagged_cells_take_infinite_limit(self, flat_cell_stack):
        d = build_design(np.ones((10, 1)))
        res = fit(flat_cell_stack, d)
        assert res.flagged.count == 2
        dev = standardized_deviation(res, d, c=0.0)
        assert dev.values[0, 0] == np.inf
        assert dev.values[0, 1] == -np.inf
        assert np.isfinite(dev.values[1:, :]).all()
        assert not res.normalized_residuals.valid[0, 0]

    def test_flagged_cell_at_level_is_zero(self, flat_cell_stack):
        d = build_design(np.ones((10, 1)))
        dev = standardized_deviation(fit(flat_cell_stack, d), d, c=3.0)
        assert dev.values[0, 0] == 0.0

    def test_strict_policy_raises(self, flat_cell_stack):
        with pytest.raises(DegenerateVarianceError) as info:
            fit(flat_cell_stack, build_design(np.ones((10, 1))), sigma_policy="strict")
        assert info.value.flagged == 2


def test_standardized_deviation_formula(residual_stack):
    d = build_design(np.ones((residual_stack.n, 1)))
    res = fit(residual_stack, d)
    dev = standardized_deviation(res, d, c=0.1)
    expected = (res.bhat[0].values - 0.1) / (d.scale * res.sigma_hat.values)
    assert np.allclose(dev.values, expected)


def test_fit_is_linear_in_the_data(rng, residual_stack):
    X = np.column_stack([np.ones(residual_stack.n), np.linspace(-1, 1, residual_stack.n)])
    d = build_design(X)
    other = FieldStack(residual_stack.geometry, rng.normal(size=residual_stack.values.shape))
    combined = FieldStack(residual_stack.geometry, 2.0 * residual_stack.values - 0.5 * other.values)
    a, b, ab = fit(residual_stack, d), fit(other, d), fit(combined, d)
    for k in range(2):
        assert np.allclose(ab.bhat[k].values, 2.0 * a.bhat[k].values - 0.5 * b.bhat[k].values)
    assert np.allclose(ab.residuals.values, 2.0 * a.residuals.values - 0.5 * b.residuals.values)


def test_standardized_deviation_falls_as_level_rises(residual_stack):
    d = build_design(np.ones((residual_stack.n, 1)))
    res = fit(residual_stack, d)
    devs = [standardized_deviation(res, d, c).values for c in (-1.0, -0.2, 0.0, 0.4, 2.0)]
    for before, after in zip(devs, devs[1:]):
        assert (after < before).all()


def test_deviation_vanishes_at_the_estimate(residual_stack):
    d = build_design(np.ones((residual_stack.n, 1)))
    centered = residual_stack.values - residual_stack.values.mean(axis=0)
    res = fit(FieldStack(residual_stack.geometry, centered), d)
    assert np.allclose(standardized_deviation(res, d, c=0.0).values, 0.0, atol=1e-12)


def test_unit_sigma_half_scale_gives_two():
    g = GridGeometry(nx=2, ny=2)
    layers = np.array([0.0, 2.0, 0.0, 2.0])[:, None, None] * np.ones((4, 2, 2))
    d = build_design(np.ones((4, 1)))
    res = fit(FieldStack(g, layers), d)
    assert d.scale == pytest.approx(0.5)
    assert np.allclose(res.sigma_hat.values, 1.0)
    assert np.allclose(standardized_deviation(res, d, c=0.0).values, 2.0)


def test_exact_linear_fit_hits_the_floor():
    g = GridGeometry(nx=2, ny=2)
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
    layers = (1.0 + 2.0 * X[:, 1])[:, None, None] * np.ones((3, 2, 2))
    res = fit(FieldStack(g, layers), build_design(X))
    assert np.allclose(res.residuals.values, 0.0, atol=1e-12)
    assert res.flagged.count == 4
    with pytest.raises(DegenerateVarianceError):
        fit(FieldStack(g, layers), build_design(X), sigma_policy="strict")
