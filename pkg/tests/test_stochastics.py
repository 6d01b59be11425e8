import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wattshop import RngStream, lognormal_from_mean_cv, sample, sample_many


def test_zero_cv_spec_is_degenerate():
    spec = lognormal_from_mean_cv(10.0, 0.0)
    assert spec.sigma == 0.0
    stream = RngStream(1, 0, "test")
    assert all(sample(stream, spec) == 10.0 for _ in range(50))


def test_zero_cv_sample_still_advances_stream():
    spec = lognormal_from_mean_cv(10.0, 0.0)
    consumed = RngStream(1, 0, "test")
    sample(consumed, spec)
    fresh = RngStream(1, 0, "test")
    fresh.standard_normal()  # discard one draw by hand
    assert consumed.standard_normal() == fresh.standard_normal()


def test_mean_cv_conversion_formulas():
    spec = lognormal_from_mean_cv(10.0, 0.2)
    assert spec.sigma == pytest.approx(math.sqrt(math.log(1.04)), rel=1e-12)
    assert spec.mu == pytest.approx(math.log(10.0) - spec.sigma**2 / 2, rel=1e-12)


@pytest.mark.parametrize("cv", [0.1, 0.5, 1.0, 2.0])
def test_unit_mean_gives_mu_of_minus_half_log(cv):
    spec = lognormal_from_mean_cv(1.0, cv)
    assert spec.mu == pytest.approx(-math.log(1.0 + cv * cv) / 2, rel=1e-12)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        lognormal_from_mean_cv(0.0, 0.2)
    with pytest.raises(ValueError):
        lognormal_from_mean_cv(-1.0, 0.2)
    with pytest.raises(ValueError):
        lognormal_from_mean_cv(1.0, -0.1)


def test_identical_keys_replay_identical_sequences():
    a = RngStream(42, 3, "demand-gap", "101")
    b = RngStream(42, 3, "demand-gap", "101")
    spec = lognormal_from_mean_cv(10.0, 0.2)
    assert [sample(a, spec) for _ in range(100)] == [sample(b, spec) for _ in range(100)]


def test_distinct_keys_differ():
    spec = lognormal_from_mean_cv(10.0, 0.2)
    base = [sample(RngStream(42, 0, "demand-gap", "101"), spec) for _ in range(5)]
    for other in [RngStream(42, 1, "demand-gap", "101"),
                  RngStream(42, 0, "demand-qty", "101"),
                  RngStream(42, 0, "demand-gap", "102"),
                  RngStream(43, 0, "demand-gap", "101")]:
        assert [sample(other, spec) for _ in range(5)] != base


def test_sample_many_matches_sequential_sampling():
    spec = lognormal_from_mean_cv(5.0, 0.4)
    batched = sample_many(RngStream(9, 0, "x"), spec, 200)
    stream = RngStream(9, 0, "x")
    sequential = [sample(stream, spec) for _ in range(200)]
    assert np.array_equal(batched, np.asarray(sequential))


@given(mean=st.floats(0.01, 1e4), cv=st.floats(0.0, 3.0))
def test_analytic_moments_of_spec(mean, cv):
    spec = lognormal_from_mean_cv(mean, cv)
    # analytic mean and CV of the lognormal recovered from (mu, sigma)
    analytic_mean = math.exp(spec.mu + spec.sigma**2 / 2)
    analytic_cv = math.sqrt(math.exp(spec.sigma**2) - 1.0)
    assert analytic_mean == pytest.approx(mean, rel=1e-9)
    assert analytic_cv == pytest.approx(cv, rel=1e-7, abs=1e-9)


def test_sample_moments_converge():
    spec = lognormal_from_mean_cv(10.0, 0.2)
    draws = sample_many(RngStream(123, 0, "mc"), spec, 200_000)
    assert draws.mean() == pytest.approx(10.0, rel=0.01)
    assert draws.std() / draws.mean() == pytest.approx(0.2, rel=0.03)
