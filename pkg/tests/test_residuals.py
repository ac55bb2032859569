import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marginloss.errors import DegenerateMarginError, DomainError, EmptyDatasetError, LabelError
from marginloss.losses import named_loss
from marginloss.residuals import (SlrrValue, component_log_s2, contribution_ratio,
                                  geometric_mean_contrast, loss_on_residual_scale, margin_of,
                                  partition, slrr, slrr_definitional)

labels = st.sampled_from([-1, 1])
scores = st.floats(-30, 30)


class TestSlrr:
    def test_zero_score(self):
        r = slrr(1, 0.0)
        assert r.s == 1.0 and r.margin == 0.0

    def test_negative_label(self):
        r = slrr(-1, 2.0)
        assert r.s == pytest.approx(-math.e, rel=1e-15)
        assert margin_of(r.s) == pytest.approx(-2.0, abs=1e-15)

    @pytest.mark.parametrize("f", [0.5, 1.0, 3.0])
    def test_reciprocal(self, f):
        assert slrr(1, f).s == pytest.approx(-1 / slrr(-1, f).s, rel=1e-15)

    def test_label_error(self):
        with pytest.raises(LabelError):
            slrr(0, 1.0)
        with pytest.raises(LabelError):
            slrr(np.array([1, 2]), np.zeros(2))

    def test_non_finite_score(self):
        with pytest.raises(DomainError):
            slrr(1, math.inf)

    def test_vectorised(self):
        r = slrr(np.array([1, -1, 1]), np.array([0.0, 1.0, -2.0]))
        assert r.s.shape == (3,)
        assert np.allclose(r.log_s_squared, -np.array([0.0, -1.0, -2.0]))

    def test_sign_and_magnitude(self):
        r = slrr(np.array([1, 1, -1, -1]), np.array([2.0, -2.0, 2.0, -2.0]))
        assert np.array_equal(np.sign(r.s), [1, 1, -1, -1])
        assert np.array_equal(np.abs(r.s) < 1, r.margin > 0)


class TestMargin:
    def test_values(self):
        assert margin_of(1.0) == 0.0
        assert margin_of(-math.e) == pytest.approx(-2.0, abs=1e-15)
        assert margin_of(0.1) == pytest.approx(math.log(100), abs=1e-14)

    def test_zero_residual(self):
        with pytest.raises(DomainError):
            margin_of(0.0)

    def test_large_scores_use_stored_margin(self):
        r = slrr(-1, 2000.0)  # s overflows
        assert margin_of(r) == -2000.0
        r = slrr(1, 2000.0)  # s underflows to zero
        assert margin_of(r) == 2000.0

    def test_round_trip_seeded(self):
        rng = np.random.Generator(np.random.PCG64(2024))
        y = np.where(rng.random(1000) < 0.5, 1, -1)
        f = rng.uniform(-30, 30, 1000)
        r = slrr(y, f)
        assert np.max(np.abs(margin_of(r) - y * f)) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(labels, scores)
def test_round_trip_property(y, f):
    assert margin_of(slrr(y, f).s) == pytest.approx(y * f, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(labels, scores)
def test_definitional_form(y, f):
    assert slrr(y, f).s == pytest.approx(slrr_definitional(y, f), rel=1e-10, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(scores)
def test_reciprocal_law(f):
    assert slrr(1, f).s * slrr(-1, f).s == pytest.approx(-1.0, abs=1e-12)


class TestPartition:
    def test_cancelling(self):
        p = partition(1, [(1, 0.5), (1, -0.5)])
        assert p.total_s2 == pytest.approx(1.0)
        assert np.allclose(p.factor_s2, [math.exp(-0.5), math.exp(0.5)])

    def test_hand_case(self):
        p = partition(-1, [(2, 1), (1, 1)])
        assert p.total_s2 == pytest.approx(math.exp(3), rel=1e-15)
        assert np.allclose(p.factor_s2, [math.exp(2), math.exp(1)], rtol=1e-15)

    def test_single(self):
        p = partition(1, [(0.7, 2.0)])
        assert p.total_s2 == p.factor_s2[0]

    def test_empty(self):
        with pytest.raises(EmptyDatasetError):
            partition(1, [])

    def test_signed_product(self):
        comps = [(0.3, 1.0), (-1.2, 0.5), (2.0, -0.25)]
        for y in (-1, 1):
            p = partition(y, comps)
            assert p.total_s == pytest.approx(y ** (len(comps) + 1) * np.prod(p.factor_s), rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(labels, st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=2, max_size=8))
def test_partition_identity(y, comps):
    p = partition(y, comps)
    assert np.prod(p.factor_s2) == pytest.approx(p.total_s2, rel=1e-10)


class TestContribution:
    def test_equal_halves(self):
        assert contribution_ratio(1, [(1, 1), (1, 1)], 0) == 0.5

    def test_three_quarters(self):
        assert contribution_ratio(1, [(3, 1), (1, 1)], 0) == 0.75

    def test_degenerate(self):
        with pytest.raises(DegenerateMarginError):
            contribution_ratio(1, [(1, 1), (-1, 1)], 0)

    def test_ratio_of_log_residuals(self):
        comps = [(0.4, 1.5), (-0.2, 2.0), (1.0, 0.3)]
        p = partition(-1, comps)
        for k in range(3):
            expect = math.log(p.factor_s2[k]) / math.log(p.total_s2)
            assert contribution_ratio(-1, comps, k) == pytest.approx(expect, rel=1e-12)

    def test_geometric_mean_contrast(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(3):
            M = int(rng.integers(2, 7))
            comps = list(zip(rng.normal(size=M), rng.normal(size=M)))
            y = int(rng.choice([-1, 1]))
            p = partition(y, comps)
            contrib = np.array([t * b for t, b in comps])
            for k in range(M):
                direct = math.log(p.factor_s2[k] / p.total_s2 ** (1 / M))
                got = geometric_mean_contrast(y, comps, k)
                assert got == pytest.approx(direct, abs=1e-12)
                assert got == pytest.approx(-y * (contrib[k] - contrib.mean()), abs=1e-12)


class TestComponentTable:
    def test_rows_sum_to_total(self):
        rng = np.random.Generator(np.random.PCG64(9))
        y = np.where(rng.random(20) < 0.5, 1, -1)
        contrib = rng.normal(size=(20, 4))
        table = component_log_s2(y, contrib)
        assert np.allclose(table.sum(axis=1), slrr(y, contrib.sum(axis=1)).log_s_squared, atol=1e-13)


class TestResidualScale:
    def test_laplace_junction(self):
        assert loss_on_residual_scale(named_loss("laplace", 2.0), 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_laplace_inner_branch(self):
        assert loss_on_residual_scale(named_loss("laplace", 2.0), 0.5) == pytest.approx(0.125, abs=1e-15)

    def test_laplace_outer_branch(self):
        m, s = 3.0, 1.7
        expect = 1 + (m + 1) / (m - 1) * (1 - s ** (-(m - 1)))
        assert loss_on_residual_scale(named_loss("laplace", m), s) == pytest.approx(expect, rel=1e-14)

    @pytest.mark.parametrize("s", [0.3, 1.0, 2.0])
    def test_exponential_is_s_squared(self, s):
        assert loss_on_residual_scale(named_loss("exp-unit"), s) == pytest.approx(s * s, rel=1e-14)

    def test_laplace_zero_one_limit(self):
        loss = named_loss("laplace", 100.0)
        assert loss_on_residual_scale(loss, 0.5) < 0.01
        assert abs(loss_on_residual_scale(loss, 2.0) - 2) < 0.05

    def test_domain(self):
        with pytest.raises(DomainError):
            loss_on_residual_scale(named_loss("logistic"), 0.0)
        with pytest.raises(DomainError):
            loss_on_residual_scale(named_loss("squared"), 0.2)


def test_logistic_geometric_mean_identity():
    rng = np.random.Generator(np.random.PCG64(11))
    y = np.where(rng.random(500) < 0.5, 1, -1)
    f = rng.normal(scale=3, size=500)
    s = slrr(y, f).s
    lhs = np.mean(named_loss("logistic")(y * f))
    rhs = np.log(np.prod((1 + s ** 2) ** (1 / len(s))))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_slrr_value_is_tuple():
    r = SlrrValue(1.0, 0.0, 1.0)
    assert r.s_squared == 1.0
