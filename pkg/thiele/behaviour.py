"""Reserve-dependent surrender: the nonlinear Thiele equation.

When the surrender intensity is a function h(t, G(t) - U(t)) of the reserve
itself, the reserve solves

    U'(t) = r U + pi - mu (b_ad - U) - h(t, G - U) (G - U),   U(n-) = b_a(n).

Solving this ODE once resolves the apparent circularity: freezing the
realised intensity nu(t) = h(t, G(t) - U(t)) and solving the linear equation
with that nu gives back U. ``consistency_check`` measures exactly that.
"""

import logging
from dataclasses import dataclass

from thiele.config import DEFAULT_STEP
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.intensities import IntensityModel
from thiele.reserves import check_basis, reserve_with_intensity, solve_plan, solver_grid, thiele_rhs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BehaviouralSolution:
    """Reserve U together with the intensity it induces."""
    reserve: ReserveGrid
    realized_intensity: ReserveGrid
    model: IntensityModel

    def realized_gain(self, surrender_grid: ReserveGrid) -> ReserveGrid:
        return ReserveGrid(self.reserve.t0, self.reserve.step, surrender_grid.values - self.reserve.values)


def solve_reserve_dependent(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    model: IntensityModel,
    step: float = DEFAULT_STEP,
) -> BehaviouralSolution:
    """Integrate the nonlinear equation directly; h sees the gain at each stage value."""
    check_basis(plan, market_rate, mortality, step)
    solver_grid(plan, step).require_aligned(surrender_grid, "surrender value grid")

    base = thiele_rhs(plan, market_rate, mortality)
    g = surrender_grid.at
    h = model.evaluate

    def rhs(t: float, v: float) -> float:
        gain = g(t) - v
        return base(t, v) - h(t, gain) * gain

    reserve = solve_plan(plan, rhs, step)
    nu = model.evaluate_many(reserve.times, surrender_grid.values - reserve.values)
    logger.debug("%s: U(0)=%.2f, max intensity %.4g", model.name, reserve.values[0], nu.max())
    return BehaviouralSolution(
        reserve=reserve,
        realized_intensity=ReserveGrid(reserve.t0, reserve.step, nu),
        model=model,
    )


def consistency_check(
    solution: BehaviouralSolution,
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    step: float = DEFAULT_STEP,
) -> float:
    """Largest node difference between U and the linear reserve at the frozen intensity."""
    linear = reserve_with_intensity(
        plan, market_rate, mortality, surrender_grid, solution.realized_intensity.at, step
    )
    return float(abs(linear.values - solution.reserve.values).max())
