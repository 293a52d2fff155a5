"""Tests for CoPE set construction and the inclusion checks."""

import numpy as np
import pytest

from src.core.bootstrap import Threshold
from src.core.cope import cope_sets, contour_band, plugin_region, verify_contour_inclusion, verify_inclusion
from src.core.glm import build_design, fit
from src.core.grid import (
    ContourSet,
    FieldStack,
    GridGeometry,
    RegionMask,
    ScalarField,
    excursion_set,
    extract_boundary,
    inner_boundary,
)
from src.errors import GeometryError, InvalidFieldError


def _a(value: float) -> Threshold:
    return Threshold(a=value, alpha=0.1, order_index=1)


@pytest.fixture
def bump():
    g = GridGeometry.square(24, 10.0)
    xx, yy = np.meshgrid(g.x_coords(), g.y_coords())
    return ScalarField(g, 3.0 * np.exp(-((xx - 5) ** 2 + (yy - 5) ** 2) / 6.0))


def test_nesting_holds_for_random_inputs(rng):
    for _ in range(300):
        ny, nx = rng.integers(2, 10, size=2)
        g = GridGeometry(nx=int(nx), ny=int(ny))
        dev = ScalarField(g, rng.normal(scale=2.0, size=(ny, nx)))
        r = cope_sets(dev, _a(float(rng.exponential(1.5))))
        assert r.upper.issubset(r.point_estimate)
        assert r.point_estimate.issubset(r.lower)


def test_sets_move_outward_as_a_grows(rng):
    g = GridGeometry(nx=9, ny=7)
    for _ in range(50):
        dev = ScalarField(g, rng.normal(scale=2.0, size=g.shape))
        lo, hi = np.sort(rng.exponential(1.5, size=2))
        small, large = cope_sets(dev, _a(float(lo))), cope_sets(dev, _a(float(hi)))
        assert large.upper.issubset(small.upper)
        assert small.lower.issubset(large.lower)
        assert small.point_estimate == large.point_estimate


def test_band_holds_boundary_of_point_estimate(rng):
    for _ in range(100):
        ny, nx = rng.integers(2, 12, size=2)
        g = GridGeometry(nx=int(nx), ny=int(ny))
        r = cope_sets(ScalarField(g, rng.normal(scale=2.0, size=(ny, nx))), _a(float(rng.exponential(1.0))))
        assert inner_boundary(r.point_estimate).issubset(contour_band(r))


def test_zero_threshold_collapses_sets(bump):
    dev = ScalarField(bump.geometry, bump.values - 1.0)
    r = cope_sets(dev, _a(0.0))
    assert r.upper == r.point_estimate == r.lower
    assert r.band == inner_boundary(r.point_estimate)


def test_infinite_threshold(bump):
    dev = ScalarField(bump.geometry, bump.values - 1.0)
    r = cope_sets(dev, _a(np.inf))
    assert r.upper.count == 0
    assert r.lower == RegionMask.full(bump.geometry)
    truth = excursion_set(bump, 1.0)
    assert verify_inclusion(r, truth).both_ok


def test_infinite_deviations_follow_their_sign():
    g = GridGeometry(nx=2, ny=2)
    r = cope_sets(ScalarField(g, [np.inf, -np.inf, 0.0, 0.0]), _a(5.0))
    assert r.upper.inside.tolist() == [[True, False], [False, False]]
    assert r.point_estimate.inside.tolist() == [[True, False], [True, True]]
    assert r.lower.inside.tolist() == [[True, False], [True, True]]


def test_nan_inside_rejected():
    g = GridGeometry(nx=2, ny=2)
    with pytest.raises(InvalidFieldError):
        cope_sets(ScalarField(g, [0.0, np.nan, 1.0, 1.0]), _a(1.0))


def test_masked_cells_stay_out(bump):
    mask = np.ones(bump.geometry.shape, dtype=bool)
    mask[12, 12] = False
    values = np.where(mask, bump.values - 1.0, np.nan)
    r = cope_sets(ScalarField(bump.geometry, values, mask), _a(0.5))
    assert not r.lower.inside[12, 12]


class TestInclusion:
    def test_detects_violations(self):
        g = GridGeometry(nx=2, ny=2)
        r = cope_sets(ScalarField(g, [3.0, 1.0, -1.0, -3.0]), _a(2.0))
        assert r.upper.inside.tolist() == [[True, False], [False, False]]
        assert r.lower.inside.tolist() == [[True, True], [True, False]]
        assert verify_inclusion(r, RegionMask(g, [[True, True], [False, False]])).both_ok
        assert not verify_inclusion(r, RegionMask.empty(g)).upper_ok
        assert not verify_inclusion(r, RegionMask.full(g)).lower_ok

    def test_exact_deviation_covers_truth(self, bump):
        truth = excursion_set(bump, 1.0)
        r = cope_sets(ScalarField(bump.geometry, bump.values - 1.0), _a(0.3))
        report = verify_inclusion(r, truth)
        assert report.upper_ok and report.lower_ok and report.both_ok

    def test_inclusion_only_improves_as_a_grows(self, bump, rng):
        truth = excursion_set(bump, 1.0)
        noisy = bump.values - 1.0 + rng.normal(scale=0.4, size=bump.geometry.shape)
        dev = ScalarField(bump.geometry, noisy)
        reports = [verify_inclusion(cope_sets(dev, _a(a)), truth) for a in np.linspace(0.0, 3.0, 13)]
        for before, after in zip(reports, reports[1:]):
            assert after.upper_ok >= before.upper_ok
            assert after.lower_ok >= before.lower_ok
        assert reports[-1].both_ok

    def test_contour_inside_band(self, bump):
        truth_contour = extract_boundary(bump, 1.0)
        r = cope_sets(ScalarField(bump.geometry, bump.values - 1.0), _a(0.3))
        assert verify_contour_inclusion(r, truth_contour)

    def test_contour_outside_band(self, bump):
        far = extract_boundary(bump, 2.5)
        r = cope_sets(ScalarField(bump.geometry, bump.values - 1.0), _a(0.05))
        assert not verify_contour_inclusion(r, far)

    def test_geometry_mismatch(self, bump):
        r = cope_sets(ScalarField(bump.geometry, bump.values - 1.0), _a(0.3))
        with pytest.raises(GeometryError):
            verify_inclusion(r, RegionMask.full(GridGeometry(nx=2, ny=2)))


class TestPluginRegion:
    @pytest.fixture
    def bump_fit(self, bump, rng):
        layers = bump.values[None] + rng.normal(scale=0.2, size=(12,) + bump.geometry.shape)
        return fit(FieldStack(bump.geometry, layers), build_design(np.ones((12, 1))))

    def test_contour_of_the_estimate(self, bump_fit):
        region = plugin_region(bump_fit, 1.0)
        assert isinstance(region, ContourSet)
        assert not region.is_empty

    def test_adjacent_cells(self, bump_fit):
        region = plugin_region(bump_fit, 1.0, "adjacent")
        assert isinstance(region, RegionMask)
        assert 0 < region.count < bump_fit.geometry.size

    def test_level_above_the_estimate_is_empty(self, bump_fit):
        assert plugin_region(bump_fit, 50.0).is_empty
