"""Tests for the in-process invariant suite."""

from src import selftest
from src.selftest import CheckFailed, run_selftest


def test_two_period_constants_pass_for_n_four():
    (result,) = run_selftest(["two-period constants"])
    assert result.passed, result.detail


def test_failed_check_is_reported_not_raised(mocker):
    def broken() -> str:
        selftest._require(1 > 2, "one is not above two")
        return "unreachable"

    mocker.patch.dict(selftest.CHECKS, {"broken": broken})
    (result,) = run_selftest(["broken"])
    assert not result.passed
    assert result.detail == "one is not above two"


def test_require_raises_without_assert_statements():
    try:
        selftest._require(False, "boom")
    except CheckFailed as exc:
        assert str(exc) == "boom"
    else:
        raise AssertionError("_require did not raise")
