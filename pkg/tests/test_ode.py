"""Tests for the backward Runge-Kutta engine."""

import math

import numpy as np
import pytest

from thiele.config import DEFAULT_STEP
from thiele.contract import PaymentPlan, RateCurve, g82_female
from thiele.errors import ConfigurationError, NumericalError
from thiele.ode import BackwardProblem, solve_backward, solve_backward_pair
from thiele.reserves import reserve_no_surrender


def discounting(rate: float, step: float, terminal: float = 2_000_000.0) -> BackwardProblem:
    return BackwardProblem(
        rhs=lambda t, v: rate * v,
        terminal_time=30.0,
        terminal_value=terminal,
        step=step,
    )


class TestSolveBackward:
    def test_pure_discounting_default_step(self):
        grid = solve_backward(discounting(0.05, DEFAULT_STEP))
        exact = 2_000_000.0 * math.exp(-1.5)
        assert abs(grid.values[0] - exact) / exact < 1e-10

    def test_grid_layout(self):
        grid = solve_backward(discounting(0.05, 0.5))
        assert len(grid) == 61
        assert grid.t0 == 0.0
        assert grid.values[-1] == 2_000_000.0

    def test_fourth_order_convergence(self):
        exact = 2_000_000.0 * math.exp(-1.5)
        coarse = abs(solve_backward(discounting(0.05, 1.0)).values[0] - exact)
        fine = abs(solve_backward(discounting(0.05, 0.5)).values[0] - exact)
        assert math.log2(coarse / fine) >= 3.5

    def test_zero_rhs_is_constant(self):
        problem = BackwardProblem(rhs=lambda t, v: 0.0, terminal_time=5.0, terminal_value=42.0, step=0.25)
        assert np.all(solve_backward(problem).values == 42.0)

    def test_breakpoint_on_node(self):
        curve = RateCurve.step(0.01, 0.065, 20.0, 30.0)
        problem = BackwardProblem(
            rhs=lambda t, v: curve(t) * v,
            terminal_time=30.0,
            terminal_value=1.0,
            step=1.0 / 120.0,
        )
        grid = solve_backward(problem)
        assert grid.values[0] == pytest.approx(math.exp(-(0.01 * 20 + 0.065 * 10)), rel=1e-10)
        assert grid.at(20.0) == pytest.approx(math.exp(-0.65), rel=1e-10)

    def test_self_convergence_on_contract(self):
        plan = PaymentPlan.constant(7_000.0, 1_000_000.0, 2_000_000.0, 30.0)
        rate = RateCurve.flat(0.02, 30.0)
        coarse = reserve_no_surrender(plan, rate, g82_female(), 1.0 / 120.0)
        fine = reserve_no_surrender(plan, rate, g82_female(), 1.0 / 240.0)
        assert coarse.values[0] == pytest.approx(fine.values[0], rel=1e-7)

    def test_start_must_precede_terminal(self):
        with pytest.raises(ConfigurationError):
            BackwardProblem(rhs=lambda t, v: v, terminal_time=1.0, terminal_value=1.0, start_time=1.0)

    def test_span_must_be_whole_steps(self):
        with pytest.raises(ConfigurationError):
            BackwardProblem(rhs=lambda t, v: v, terminal_time=1.0, terminal_value=1.0, step=0.3)

    def test_non_finite_rhs_reports_time(self):
        def rhs(t, v):
            return math.nan if t < 2.0 else v

        with pytest.raises(NumericalError) as excinfo:
            solve_backward(BackwardProblem(rhs=rhs, terminal_time=3.0, terminal_value=1.0, step=0.5))
        assert excinfo.value.time == pytest.approx(2.0)


class TestSolveBackwardPair:
    def test_decoupled_pair_matches_scalar_bitwise(self):
        rates = np.array([0.05, 0.02])
        pair = BackwardProblem(
            rhs=lambda t, v: rates * v,
            terminal_time=30.0,
            terminal_value=(2_000_000.0, 1_000_000.0),
            step=1.0 / 120.0,
        )
        first, second = solve_backward_pair(pair)
        assert np.array_equal(first.values, solve_backward(discounting(0.05, 1.0 / 120.0)).values)
        assert np.array_equal(
            second.values, solve_backward(discounting(0.02, 1.0 / 120.0, 1_000_000.0)).values
        )

    def test_zero_rhs_pair(self):
        pair = BackwardProblem(
            rhs=lambda t, v: np.zeros(2), terminal_time=2.0, terminal_value=(1.0, 3.0), step=0.5
        )
        first, second = solve_backward_pair(pair)
        assert np.all(first.values == 1.0)
        assert np.all(second.values == 3.0)

    def test_pair_needs_two_values(self):
        pair = BackwardProblem(rhs=lambda t, v: v, terminal_time=1.0, terminal_value=(1.0, 2.0, 3.0), step=0.5)
        with pytest.raises(ConfigurationError):
            solve_backward_pair(pair)
