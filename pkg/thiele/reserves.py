"""Linear Thiele equations: surrender value, market reserve, fixed-intensity surrender."""

import logging
from collections.abc import Callable

import numpy as np

from thiele.config import DEFAULT_STEP
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.errors import DomainError
from thiele.ode import BackwardProblem, solve_backward

logger = logging.getLogger(__name__)

Rhs = Callable[[float, float], float]


def thiele_rhs(plan: PaymentPlan, rate: RateCurve, mortality: MortalityCurve) -> Rhs:
    """``r V + pi - mu (b_ad - V)``: the reserve dynamics without surrender."""
    r = rate.evaluate
    pi = plan.premium_intensity
    b_ad = plan.death_benefit
    mu = mortality.evaluate

    def rhs(t: float, v: float) -> float:
        return r(t) * v + pi(t) - mu(t) * (b_ad(t) - v)

    return rhs


def check_basis(plan: PaymentPlan, rate: RateCurve, mortality: MortalityCurve, step: float) -> None:
    rate.check_grid(step, plan.horizon)
    mortality.validate(plan.horizon)


def solver_grid(plan: PaymentPlan, step: float, start: float = 0.0) -> ReserveGrid:
    """Geometry every grid passed alongside ``plan`` must match."""
    return ReserveGrid.shape_of(start, plan.horizon, step)


def solve_plan(plan: PaymentPlan, rhs: Rhs, step: float, start: float = 0.0) -> ReserveGrid:
    """Backward solve from ``plan.terminal_benefit`` at the horizon."""
    return solve_backward(BackwardProblem(
        rhs=rhs,
        terminal_time=plan.horizon,
        terminal_value=plan.terminal_benefit,
        start_time=start,
        step=step,
    ))


def surrender_value(
    plan: PaymentPlan,
    technical_rate: RateCurve,
    technical_mortality: MortalityCurve,
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """Technical reserve G, paid out on surrender."""
    check_basis(plan, technical_rate, technical_mortality, step)
    return solve_plan(plan, thiele_rhs(plan, technical_rate, technical_mortality), step)


def reserve_no_surrender(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """Market reserve V when the policyholder never surrenders."""
    check_basis(plan, market_rate, mortality, step)
    return solve_plan(plan, thiele_rhs(plan, market_rate, mortality), step)


def reserve_with_intensity(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    nu: Callable[[float], float],
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """Market reserve when surrender happens at the deterministic intensity ``nu(t)``.

    G between nodes is interpolated linearly inside the Runge-Kutta stages.
    """
    check_basis(plan, market_rate, mortality, step)
    grid = solver_grid(plan, step)
    grid.require_aligned(surrender_grid, "surrender value grid")
    negative = [t for t in grid.times if nu(float(t)) < 0]
    if negative:
        raise DomainError(f"surrender intensity is negative at t={negative[0]}")

    base = thiele_rhs(plan, market_rate, mortality)
    g = surrender_grid.at

    def rhs(t: float, v: float) -> float:
        return base(t, v) - nu(t) * (g(t) - v)

    return solve_plan(plan, rhs, step)


def envelope(surrender_grid: ReserveGrid, baseline: ReserveGrid) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise (min, max) of G and the no-surrender reserve."""
    return (
        np.minimum(surrender_grid.values, baseline.values),
        np.maximum(surrender_grid.values, baseline.values),
    )
