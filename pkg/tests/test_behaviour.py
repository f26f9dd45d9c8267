"""Tests for reserve-dependent surrender."""

import numpy as np
import pytest
from conftest import B_A, TEST_STEP

from thiele.behaviour import consistency_check, solve_reserve_dependent
from thiele.config import DEFAULT_STEP
from thiele.intensities import ConstantIntensity, ExponentialIntensity, IndicatorIntensity, ZeroIntensity
from thiele.reserves import reserve_with_intensity, surrender_value


class TestSolveReserveDependent:
    def test_zero_model_is_no_surrender_bitwise(self, plan, mortality, surrender, rates, runs):
        solution = solve_reserve_dependent(plan, rates["example3"], mortality, surrender, ZeroIntensity(), TEST_STEP)
        assert np.array_equal(solution.reserve.values, runs["example3"].baseline.values)
        assert np.all(solution.realized_intensity.values == 0.0)

    def test_constant_model_is_linear_bitwise(self, plan, mortality, surrender, rates):
        solution = solve_reserve_dependent(
            plan, rates["example1"], mortality, surrender, ConstantIntensity(0.05), TEST_STEP
        )
        linear = reserve_with_intensity(plan, rates["example1"], mortality, surrender, lambda t: 0.05, TEST_STEP)
        assert np.array_equal(solution.reserve.values, linear.values)

    def test_model_a_above_model_c_when_surrender_gains(self, runs):
        solutions = runs["example1"].solutions
        assert np.all(solutions["a"].reserve.values >= solutions["c"].reserve.values - 1e-9 * B_A)

    def test_realized_intensity_follows_gain(self, runs, surrender):
        solution = runs["example4"].solutions["e"]
        gain = solution.realized_gain(surrender).values
        expected = np.where(gain > 0, 5.0, 0.0)
        assert np.array_equal(solution.realized_intensity.values, expected)

    def test_indicator_with_negative_gain_is_no_surrender(self, runs):
        # surrender never gains in example 2, so models b and e never fire
        run = runs["example2"]
        for key in ("b", "e"):
            assert np.allclose(run.solutions[key].reserve.values, run.baseline.values, rtol=1e-10, atol=0.0)


class TestMonotoneRationality:
    @pytest.mark.parametrize(
        "example,models,target",
        [
            ("example2", [ExponentialIntensity(0.05, theta) for theta in (3e-6, 1e-5, 3e-5)], "V_d"),
            ("example1", [IndicatorIntensity(theta) for theta in (0.5, 2.0, 20.0)], "G"),
        ],
    )
    def test_more_rational_moves_towards_worst_case(self, runs, example, models, target):
        run = runs[example]
        b = run.basis
        reserves = [
            solve_reserve_dependent(
                b.plan, b.market_rate, b.mortality, run.surrender, model, TEST_STEP
            ).reserve.values
            for model in models
        ]
        goal = (run.baseline if target == "V_d" else run.surrender).values
        tol = 1e-6 * B_A
        for less, more in zip(reserves, reserves[1:]):
            assert np.all(more >= less - tol)
            assert np.all(np.abs(goal - more)[:-1] <= np.abs(goal - less)[:-1] + tol)
        assert np.all(reserves[-1] <= run.worst.worst_reserve.values + tol)


class TestConsistencyCheck:
    def test_zero_model_exact(self, runs):
        run = runs["example1"]
        b = run.basis
        solution = run.solutions["d"]
        assert consistency_check(solution, b.plan, b.market_rate, b.mortality, run.surrender, TEST_STEP) == 0.0

    @pytest.mark.parametrize("example", ["example1", "example2", "example3", "example4"])
    @pytest.mark.parametrize("key,tolerance", [("a", 1e-5), ("b", 1e-4), ("c", 1e-9), ("e", 1e-4)])
    def test_fixed_point_on_coarse_grid(self, runs, example, key, tolerance):
        run = runs[example]
        b = run.basis
        residual = consistency_check(
            run.solutions[key], b.plan, b.market_rate, b.mortality, run.surrender, TEST_STEP
        )
        assert residual < tolerance * B_A


@pytest.mark.slow
class TestConsistencyDefaultStep:
    @pytest.fixture(scope="class")
    def default_surrender(self, plan, technical_rate, mortality):
        return surrender_value(plan, technical_rate, mortality, DEFAULT_STEP)

    def test_model_a_example2(self, plan, mortality, rates, default_surrender):
        solution = solve_reserve_dependent(
            plan, rates["example2"], mortality, default_surrender, ExponentialIntensity(0.05, 3e-6)
        )
        residual = consistency_check(solution, plan, rates["example2"], mortality, default_surrender)
        assert residual < 1e-6 * B_A

    def test_model_e_example3(self, plan, mortality, rates, default_surrender):
        solution = solve_reserve_dependent(
            plan, rates["example3"], mortality, default_surrender, IndicatorIntensity(5.0)
        )
        residual = consistency_check(solution, plan, rates["example3"], mortality, default_surrender)
        assert residual < 1e-4 * B_A
