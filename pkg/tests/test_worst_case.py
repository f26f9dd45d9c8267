"""Tests for the worst-case reserve and its brute-force oracle."""

import numpy as np
import pytest
from conftest import B_A, TEST_STEP

from thiele.behaviour import solve_reserve_dependent
from thiele.contract import PaymentPlan, RateCurve, ReserveGrid, g82_female
from thiele.errors import ConfigurationError
from thiele.intensities import ConstantIntensity, ExponentialIntensity, IndicatorIntensity, ZeroIntensity
from thiele.reserves import reserve_no_surrender, surrender_value
from thiele.worst_case import brute_force_worst_case, worst_case_reserve


def brute_force(run):
    b = run.basis
    return brute_force_worst_case(b.plan, b.market_rate, b.mortality, run.surrender, run.baseline, TEST_STEP)


class TestWorstCaseReserve:
    def test_example1_immediate_surrender(self, runs):
        run = runs["example1"]
        worst, g = run.worst, run.surrender.values
        relative = np.abs(worst.worst_reserve.values[:-1] - g[:-1]) / g[:-1]
        assert relative.max() < 1e-6
        assert np.allclose(worst.latest_optimal.values[:-1], run.surrender.times[:-1], rtol=0, atol=1e-9)

    def test_example2_never_surrender(self, runs):
        run = runs["example2"]
        assert np.array_equal(run.worst.worst_reserve.values, run.baseline.values)
        assert np.all(run.worst.latest_optimal.values == pytest.approx(30.0))
        assert np.all(run.worst.gain_envelope.values == 0.0)

    def test_example3_max_of_surrender_and_market(self, runs):
        run = runs["example3"]
        best = np.maximum(run.surrender.values, run.baseline.values)
        assert np.max(np.abs(run.worst.worst_reserve.values - best) / best) < 1e-5

    def test_example4_plans_surrender_at_switch(self, runs):
        run = runs["example4"]
        worst = run.worst
        assert worst.u_star(10.0) == pytest.approx(20.0, abs=1e-9)
        margin = worst.worst_reserve.at(10.0) - max(run.surrender.at(10.0), run.baseline.at(10.0))
        assert margin > 0

    def test_example4_before_switch(self, runs):
        run = runs["example4"]
        before = run.surrender.times < 20.0 - 1e-9
        w = run.worst.worst_reserve.values[before]
        best = np.maximum(run.surrender.values, run.baseline.values)[before]
        assert np.all(w - best > 0)
        assert np.allclose(run.worst.latest_optimal.values[before], 20.0, rtol=0, atol=1e-9)

    def test_worst_case_dominates(self, runs):
        for run in runs.values():
            w = run.worst.worst_reserve.values
            best = np.maximum(run.surrender.values, run.baseline.values)
            assert np.all(w >= best - 1e-9 * B_A)

    @pytest.mark.parametrize("example", ["example1", "example2", "example3", "example4"])
    def test_time_consistency(self, runs, example):
        run = runs[example]
        b, worst = run.basis, run.worst
        times = run.surrender.times
        d = np.exp(-(b.market_rate.integrate_steps(times) + b.mortality.integrate_steps(times)))
        m = worst.gain_envelope.values
        continuation = d * m[1:]
        tol = 1e-12 * B_A
        assert np.all(m[:-1] >= continuation - tol)
        waiting = worst.latest_optimal.values[:-1] > times[:-1] + 1e-9
        assert np.allclose(m[:-1][waiting], continuation[waiting], rtol=1e-12, atol=tol)
        assert np.all(m[:-1][~waiting] > continuation[~waiting])

    @pytest.mark.parametrize("example", ["example1", "example2", "example3", "example4"])
    @pytest.mark.parametrize(
        "model",
        [
            ExponentialIntensity(0.05, 3e-6),
            ExponentialIntensity(0.05, 1e-5),
            IndicatorIntensity(0.5),
            IndicatorIntensity(20.0),
            ConstantIntensity(0.05),
            ZeroIntensity(),
        ],
        ids=lambda model: repr(model),
    )
    def test_dominates_every_behaviour(self, runs, example, model):
        run = runs[example]
        b = run.basis
        solution = solve_reserve_dependent(
            b.plan, b.market_rate, b.mortality, run.surrender, model, TEST_STEP
        )
        assert np.all(solution.reserve.values <= run.worst.worst_reserve.values + 1e-6 * B_A)

    def test_misaligned_baseline(self, runs):
        run = runs["example1"]
        b = run.basis
        other = reserve_no_surrender(b.plan, b.market_rate, b.mortality, 1.0 / 12.0)
        with pytest.raises(ConfigurationError, match="baseline"):
            worst_case_reserve(b.plan, b.market_rate, b.mortality, run.surrender, other, TEST_STEP)


class TestBruteForce:
    @pytest.mark.parametrize("example", ["example1", "example2", "example3", "example4"])
    def test_matches_recursion(self, runs, example):
        run = runs[example]
        oracle = brute_force(run)
        difference = np.abs(oracle.worst_reserve.values - run.worst.worst_reserve.values)
        assert difference.max() < 1e-10 * B_A
        assert oracle.u_star(0.0) == pytest.approx(run.worst.u_star(0.0), abs=1e-9)

    def test_single_node_grid(self):
        plan = PaymentPlan.constant(7_000.0, 1_000_000.0, 2_000_000.0, 30.0)
        rate = RateCurve.flat(0.05, 30.0)
        terminal = ReserveGrid(30.0, TEST_STEP, [2_000_000.0])
        for solve in (worst_case_reserve, brute_force_worst_case):
            solution = solve(plan, rate, g82_female(), terminal, terminal, TEST_STEP)
            assert solution.worst_reserve.values[0] == 2_000_000.0
            assert solution.gain_envelope.values[0] == 0.0
            assert solution.u_star(30.0) == 30.0

    def test_short_horizon(self):
        plan = PaymentPlan.constant(7_000.0, 1_000_000.0, 2_000_000.0, 2.0)
        mortality = g82_female()
        g = surrender_value(plan, RateCurve.flat(0.05, 2.0), mortality, 0.25)
        market = RateCurve.step(0.01, 0.065, 1.0, 2.0)
        v = reserve_no_surrender(plan, market, mortality, 0.25)
        fast = worst_case_reserve(plan, market, mortality, g, v, 0.25)
        slow = brute_force_worst_case(plan, market, mortality, g, v, 0.25)
        assert np.allclose(fast.worst_reserve.values, slow.worst_reserve.values, rtol=1e-13, atol=0.0)
        assert np.array_equal(fast.latest_optimal.values, slow.latest_optimal.values)
