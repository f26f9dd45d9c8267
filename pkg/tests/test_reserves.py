"""Tests for the linear reserves."""

import math

import numpy as np
import pytest
from conftest import B_A, TEST_STEP

from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.errors import ConfigurationError, DomainError
from thiele.reserves import envelope, reserve_no_surrender, reserve_with_intensity, surrender_value


def prospective_value(plan, rate: float, mortality, points: int = 1_000_001) -> float:
    """Reserve at 0 as an integral of discounted survival-weighted payments."""
    s = np.linspace(0.0, plan.horizon, points)
    k = mortality.log_slope * math.log(10.0)
    gompertz = 10.0 ** (mortality.log_scale + mortality.log_slope * mortality.age_offset)
    hazard = mortality.base * s + gompertz * (np.exp(k * s) - 1.0) / k
    weight = np.exp(-rate * s - hazard)
    mu = mortality.evaluate(s)
    flow = weight * (mu * plan.death_benefit(0.0) - plan.premium_intensity(0.0))
    h = s[1] - s[0]
    integral = h * (flow.sum() - 0.5 * (flow[0] + flow[-1]))
    return plan.terminal_benefit * weight[-1] + integral


class TestSurrenderValue:
    def test_pure_discounting(self):
        plan = PaymentPlan.constant(0.0, 0.0, B_A, 30.0)
        grid = surrender_value(plan, RateCurve.flat(0.05, 30.0), MortalityCurve.zero(), TEST_STEP)
        assert grid.values[0] == pytest.approx(B_A * math.exp(-1.5), rel=1e-10)

    def test_contract_against_integral(self, plan, technical_rate, mortality, surrender):
        expected = prospective_value(plan, 0.05, mortality)
        assert surrender.values[0] == pytest.approx(expected, rel=1e-6)

    def test_terminal_node(self, surrender):
        assert surrender.values[-1] == B_A
        assert len(surrender) == 3_601


class TestReserveNoSurrender:
    def test_identical_bases_give_surrender_value(self, plan, technical_rate, mortality, surrender):
        market = reserve_no_surrender(plan, RateCurve.flat(0.05, 30.0), mortality, TEST_STEP)
        assert np.allclose(market.values, surrender.values, rtol=1e-12, atol=0.0)

    def test_high_rate_below_surrender_value(self, runs):
        run = runs["example1"]
        assert np.all(run.baseline.values[:-1] < run.surrender.values[:-1])

    def test_low_rate_above_surrender_value(self, runs):
        run = runs["example2"]
        assert np.all(run.baseline.values[:-1] > run.surrender.values[:-1])


class TestReserveWithIntensity:
    def test_zero_intensity_is_no_surrender_bitwise(self, plan, mortality, surrender, rates, runs):
        grid = reserve_with_intensity(plan, rates["example2"], mortality, surrender, lambda t: 0.0, TEST_STEP)
        assert np.array_equal(grid.values, runs["example2"].baseline.values)

    @pytest.mark.parametrize("example", ["example1", "example2"])
    def test_constant_intensity_lies_between(self, plan, mortality, surrender, rates, runs, example):
        grid = reserve_with_intensity(plan, rates[example], mortality, surrender, lambda t: 0.05, TEST_STEP)
        low, high = envelope(surrender, runs[example].baseline)
        tol = 1e-9 * B_A
        assert np.all(grid.values >= low - tol)
        assert np.all(grid.values <= high + tol)

    @pytest.mark.parametrize("example,direction", [("example1", 1.0), ("example2", -1.0)])
    def test_monotone_in_intensity(self, plan, mortality, surrender, rates, example, direction):
        # surrender gains in example 1 and loses in example 2
        grids = [
            reserve_with_intensity(plan, rates[example], mortality, surrender, lambda t, nu=nu: nu, TEST_STEP)
            for nu in (0.0, 0.02, 0.05, 0.2)
        ]
        for lower, higher in zip(grids, grids[1:]):
            assert np.all(direction * (higher.values - lower.values) >= -1e-9 * B_A)
        assert direction * (grids[-1].values[0] - grids[0].values[0]) > 0

    def test_negative_intensity_rejected(self, plan, mortality, surrender, rates):
        with pytest.raises(DomainError):
            reserve_with_intensity(plan, rates["example1"], mortality, surrender, lambda t: -0.01, TEST_STEP)

    def test_misaligned_surrender_grid(self, plan, mortality, rates):
        coarse = ReserveGrid.shape_of(0.0, 30.0, 1.0 / 12.0)
        with pytest.raises(ConfigurationError, match="surrender value grid"):
            reserve_with_intensity(plan, rates["example1"], mortality, coarse, lambda t: 0.05, TEST_STEP)
