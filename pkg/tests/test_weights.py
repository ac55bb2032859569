import math

import numpy as np
import pytest
from scipy import stats

from marginloss.distributions import GAUSSIAN, LOGISTIC, UNIFORM
from marginloss.errors import DomainError, ParameterError, UnsupportedError
from marginloss.weights import WeightFn, check_even, parse_weight, weight_eval, weight_log_derivative

GRID = np.concatenate([-np.arange(0.1, 5.01, 0.1), np.arange(0.1, 5.01, 0.1)])

NAMED = [
    WeightFn.constant(0.5),
    WeightFn.likelihood(),
    WeightFn.savage(),
    WeightFn.gaussian_kernel(1.0),
    WeightFn.gaussian_kernel(4.0),
    WeightFn.laplace_kernel(1.0),
    WeightFn.laplace_kernel(2.0),
    WeightFn.laplace_kernel(5.0),
    WeightFn.buzas2009(1.0),
    WeightFn.buzas2009(2.5),
]


def logistic_f(w):
    return 1.0 / (1.0 + math.exp(-w))


class TestNamedValues:
    def test_constant(self):
        for w in (-3.0, 0.0, 2.0):
            assert weight_eval(WeightFn.constant(0.5), LOGISTIC, w) == 0.5

    def test_likelihood_at_zero(self):
        # F'(0) / sqrt(F(0)(1 - F(0))) = 0.25 / 0.5
        assert weight_eval(WeightFn.likelihood(), LOGISTIC, 0.0) == pytest.approx(0.5, abs=1e-15)

    def test_savage_at_zero(self):
        assert weight_eval(WeightFn.savage(), LOGISTIC, 0.0) == pytest.approx(0.25 ** 1.5, abs=1e-15)

    def test_savage_composition(self):
        for w in (-2.0, 0.7, 3.0):
            f = logistic_f(w)
            assert weight_eval(WeightFn.savage(), LOGISTIC, w) == pytest.approx((f * (1 - f)) ** 1.5, rel=1e-13)

    def test_gaussian_kernel_formula(self):
        m, w = 4.0, 1.3
        expect = math.exp(-w * w / (2 * m) - m / 8) / math.sqrt(2 * math.pi * m)
        assert weight_eval(WeightFn.gaussian_kernel(m), LOGISTIC, w) == pytest.approx(expect, rel=1e-14)

    def test_laplace_kernel_formula(self):
        m, w = 2.0, -1.5
        expect = (m + 1) / 2 * math.exp(-m * abs(w) / 2)
        assert weight_eval(WeightFn.laplace_kernel(m), LOGISTIC, w) == pytest.approx(expect, rel=1e-14)

    def test_buzas_formula(self):
        m, w = 2.0, 0.8
        f = logistic_f(w)
        expect = stats.norm.pdf(w / m) / m / math.sqrt(f * (1 - f))
        assert weight_eval(WeightFn.buzas2009(m), LOGISTIC, w) == pytest.approx(expect, rel=1e-13)

    def test_likelihood_under_gaussian(self):
        w = 1.1
        expect = stats.norm.pdf(w) / math.sqrt(stats.norm.cdf(w) * stats.norm.sf(w))
        assert weight_eval(WeightFn.likelihood(), GAUSSIAN, w) == pytest.approx(expect, rel=1e-13)


class TestLogDerivative:
    def test_constant_is_zero(self):
        assert weight_log_derivative(WeightFn.constant(0.5), LOGISTIC, 1.7) == 0.0

    def test_savage_at_zero(self):
        assert weight_log_derivative(WeightFn.savage(), LOGISTIC, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_savage_closed_form(self):
        for w in (-4.0, -1.0, 2.5):
            expect = -1.5 + 3 * (1 - logistic_f(w))
            assert weight_log_derivative(WeightFn.savage(), LOGISTIC, w) == pytest.approx(expect, abs=1e-14)

    def test_gaussian_kernel(self):
        assert weight_log_derivative(WeightFn.gaussian_kernel(1.0), LOGISTIC, 2.0) == pytest.approx(-2.0)

    @pytest.mark.parametrize("wf", NAMED, ids=lambda w: w.name)
    @pytest.mark.parametrize("dist", [LOGISTIC, GAUSSIAN], ids=["logistic", "gaussian"])
    def test_matches_finite_difference(self, wf, dist):
        w = GRID[np.abs(GRID) > 0.05]
        w = w[np.asarray(wf.value(dist, w)) > 1e-12]
        h = 1e-5
        fd = (np.log(wf.value(dist, w + h)) - np.log(wf.value(dist, w - h))) / (2 * h)
        assert np.max(np.abs(fd - wf.log_derivative(dist, w))) < 1e-6

    def test_custom_without_derivative(self):
        wf = WeightFn.custom(lambda w: np.ones_like(np.asarray(w, dtype=float)))
        assert not wf.has_log_derivative
        with pytest.raises(UnsupportedError):
            wf.log_derivative(LOGISTIC, 0.3)

    def test_power_and_scale(self):
        wf = WeightFn.savage().with_power(1 / 3).scaled(2.0)
        for w in (-1.0, 0.5):
            assert wf.value(LOGISTIC, w) == pytest.approx(2 * WeightFn.likelihood().value(LOGISTIC, w), rel=1e-13)
            assert wf.log_derivative(LOGISTIC, w) == pytest.approx(
                WeightFn.likelihood().log_derivative(LOGISTIC, w), abs=1e-13)


class TestEvenness:
    @pytest.mark.parametrize("wf", NAMED, ids=lambda w: w.name)
    def test_named_weights_even_and_nonnegative(self, wf):
        assert check_even(wf, LOGISTIC, GRID).passed
        assert np.all(np.asarray(wf.value(LOGISTIC, GRID)) >= 0)

    def test_laplace_even(self):
        assert check_even(WeightFn.laplace_kernel(2.0), LOGISTIC, GRID).passed

    def test_odd_part_detected(self):
        wf = WeightFn.custom(lambda w: np.asarray(w, dtype=float) + 1.0)
        report = check_even(wf, LOGISTIC, [-1.0, 1.0])
        assert not report.passed
        assert report.max_asymmetry == pytest.approx(2.0)

    def test_symmetrize_takes_even_part(self):
        wf = WeightFn.custom(lambda w: np.asarray(w, dtype=float) + 1.0, symmetrize=True)
        assert check_even(wf, LOGISTIC, GRID).passed
        assert wf.value(LOGISTIC, 0.7) == pytest.approx(1.0)

    def test_likelihood_gaussian_even(self):
        assert check_even(WeightFn.likelihood(), GAUSSIAN, [-2, -1, -0.5, 0.5, 1, 2]).passed


class TestIdentities:
    @pytest.mark.parametrize("dist", [LOGISTIC, GAUSSIAN, UNIFORM], ids=lambda d: d.name)
    def test_likelihood_weight_identity(self, dist):
        # q(w)^{-1/2} g_L(w) = G'(w) / G(w)
        w = np.linspace(-0.9, 0.9, 19) if dist.bounded else np.linspace(-6, 6, 49)
        lhs = np.exp(-0.5 * dist.log_odds(w)) * WeightFn.likelihood().value(dist, w)
        rhs = dist.density(w) / dist.cdf(w)
        assert np.max(np.abs(lhs - rhs) / rhs) < 1e-10


class TestValidation:
    @pytest.mark.parametrize("ctor", [WeightFn.gaussian_kernel, WeightFn.laplace_kernel, WeightFn.buzas2009])
    @pytest.mark.parametrize("m", [0.0, -1.0, math.inf])
    def test_m_must_be_positive(self, ctor, m):
        with pytest.raises(ParameterError):
            ctor(m)

    def test_negative_constant(self):
        with pytest.raises(ParameterError):
            WeightFn.constant(-0.1)

    def test_domain_error_on_uniform_endpoint(self):
        with pytest.raises(DomainError):
            WeightFn.likelihood().value(UNIFORM, 1.0)


class TestParse:
    @pytest.mark.parametrize("text, kind, m", [
        ("constant:0.25", "constant", None),
        ("likelihood", "likelihood", None),
        ("savage", "savage", None),
        ("gauss:3", "gauss", 3.0),
        ("laplace:5", "laplace", 5.0),
        ("buzas2009:2", "buzas2009", 2.0),
    ])
    def test_identifiers(self, text, kind, m):
        wf = parse_weight(text)
        assert wf.kind.value == kind
        assert wf.m == m
        if kind == "constant":
            assert wf.c == 0.25

    def test_unknown(self):
        with pytest.raises(ParameterError):
            parse_weight("hinge")
