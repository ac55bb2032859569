import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from marginloss.distributions import (GAUSSIAN, LOGISTIC, UNIFORM, cdf_density, cdf_eval, get_cdf,
                                      odds)
from marginloss.errors import DomainError, ParameterError

ALL = [LOGISTIC, UNIFORM, GAUSSIAN]


def interior(dist):
    return np.linspace(-0.95, 0.95, 39) if dist.bounded else np.linspace(-8, 8, 81)


class TestExamples:
    def test_logistic_center(self):
        assert cdf_eval(LOGISTIC, 0.0) == 0.5

    def test_logistic_ln3(self):
        assert cdf_eval(LOGISTIC, math.log(3)) == pytest.approx(0.75, abs=1e-15)

    def test_uniform_half(self):
        assert cdf_eval(UNIFORM, 0.5) == pytest.approx(0.75, abs=1e-15)

    def test_densities(self):
        assert cdf_density(LOGISTIC, 0.0) == pytest.approx(0.25, abs=1e-16)
        assert cdf_density(UNIFORM, 0.3) == 0.5
        assert cdf_density(GAUSSIAN, 0.0) == pytest.approx(stats.norm.pdf(0.0), abs=1e-16)

    def test_odds(self):
        assert odds(LOGISTIC, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert odds(LOGISTIC, math.log(3)) == pytest.approx(3.0, rel=1e-14)
        for w in (-2.0, -1.0, 1.0, 2.0):
            assert odds(LOGISTIC, w) == pytest.approx(math.exp(w), rel=1e-14)


class TestDomain:
    @pytest.mark.parametrize("w", [-1.0, 1.0, 1.5, -7.0])
    def test_uniform_endpoints_rejected(self, w):
        with pytest.raises(DomainError):
            cdf_eval(UNIFORM, w)
        with pytest.raises(DomainError):
            odds(UNIFORM, w)

    def test_logistic_extreme_is_stable(self):
        assert cdf_eval(LOGISTIC, 800.0) == 1.0
        assert cdf_eval(LOGISTIC, -800.0) == 0.0
        assert LOGISTIC.log_odds(800.0) == pytest.approx(800.0)
        assert np.isfinite(LOGISTIC.log_cdf(-800.0))

    def test_get_cdf(self):
        assert get_cdf("gaussian") is GAUSSIAN
        assert get_cdf(LOGISTIC) is LOGISTIC
        with pytest.raises(ParameterError):
            get_cdf("cauchy")


@pytest.mark.parametrize("dist", ALL, ids=lambda d: d.name)
class TestInvariants:
    def test_symmetry(self, dist):
        w = interior(dist)
        assert np.max(np.abs(dist.cdf(w) + dist.cdf(-w) - 1)) < 1e-12

    def test_odds_reciprocal(self, dist):
        w = interior(dist)
        assert np.max(np.abs(dist.odds(w) * dist.odds(-w) - 1)) < 1e-12

    def test_density_even(self, dist):
        w = interior(dist)
        assert np.max(np.abs(dist.density(w) - dist.density(-w))) < 1e-12

    def test_density_matches_finite_difference(self, dist):
        w = interior(dist)
        h = 1e-5
        fd = (dist.cdf(w + h) - dist.cdf(w - h)) / (2 * h)
        assert np.max(np.abs(fd - dist.density(w))) < 1e-6

    def test_center(self, dist):
        assert dist.cdf(0.0) == 0.5

    def test_log_derivatives(self, dist):
        w = interior(dist)
        h = 1e-5
        fd = (dist.log_odds(w + h) - dist.log_odds(w - h)) / (2 * h)
        assert np.max(np.abs(fd - dist.dlog_odds(w))) < 1e-6


class TestGaussianAccuracy:
    def test_against_scipy(self):
        w = np.linspace(-10, 10, 201)
        assert np.max(np.abs(GAUSSIAN.cdf(w) - stats.norm.cdf(w))) <= 1e-15
        assert np.max(np.abs(GAUSSIAN.log_cdf(w) - stats.norm.logcdf(w))) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30))
def test_logistic_odds_is_exp(w):
    assert LOGISTIC.log_odds(w) == pytest.approx(w, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.999, 0.999), st.floats(-0.999, 0.999))
def test_uniform_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    assert UNIFORM.cdf(lo) <= UNIFORM.cdf(hi)
