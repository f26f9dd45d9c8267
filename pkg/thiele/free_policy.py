"""Free-policy (paid-up) conversion alongside surrender.

An active policy may surrender (intensity h_as, receives G) or convert into
a free policy (intensity h_af). A policy converted at time u pays no more
premiums and keeps the benefits scaled by f(u); it may still surrender with
intensity h_fs against the scaled surrender value f(u) G_f.

When h_fs does not depend on u, the free-policy reserve factorises as
V_f(t, u) = f(u) V_f*(t), with V_f* the premium-free reference reserve.
``free_policy_surface`` solves the general case one conversion time at a time.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from thiele.behaviour import solve_reserve_dependent
from thiele.config import DEFAULT_STEP, DEFAULT_SURFACE_STRIDE
from thiele.contract import (
    FreePolicyPlan,
    MortalityCurve,
    PaymentPlan,
    RateCurve,
    ReserveGrid,
    grid_steps,
)
from thiele.errors import ConfigurationError
from thiele.intensities import IntensityModel
from thiele.ode import BackwardProblem, solve_backward
from thiele.reserves import (
    check_basis,
    reserve_with_intensity,
    solve_plan,
    solver_grid,
    surrender_value,
    thiele_rhs,
)

logger = logging.getLogger(__name__)


def free_policy_surrender_value(
    plan: PaymentPlan,
    technical_rate: RateCurve,
    technical_mortality: MortalityCurve,
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """G_f: technical reserve of the premium-free plan."""
    return surrender_value(plan.premium_free(), technical_rate, technical_mortality, step)


def technical_scaling(
    surrender_grid: ReserveGrid,
    free_surrender_grid: ReserveGrid,
    floor: float = 1e-6,
) -> Callable[[float], float]:
    """f(u) = G(u) / G_f(u): benefits reduced so the technical reserve is kept at conversion."""
    surrender_grid.require_aligned(free_surrender_grid, "free-policy surrender value grid")
    ratio = surrender_grid.values / free_surrender_grid.values
    factors = ReserveGrid(surrender_grid.t0, surrender_grid.step, np.clip(ratio, floor, 1.0))
    return factors.at


def free_policy_reference(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    free_surrender_grid: ReserveGrid,
    nu_fs: Callable[[float], float] | IntensityModel,
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """V_f*: premium-free reserve with surrender against G_f.

    ``nu_fs`` is a function of time, or an intensity family applied to the
    reference gain G_f - V_f*; either way it must not depend on the
    conversion time, so V_f(t, u) = f(u) V_f*(t) holds exactly.

    ``free_policy_surface`` lets the family see f(u) G_f - V_f instead. For a
    gain-dependent family that is a different model, and its columns differ
    from f(u) V_f* by more than the factor.
    """
    reference_plan = plan.premium_free()
    if isinstance(nu_fs, IntensityModel):
        return solve_reserve_dependent(
            reference_plan, market_rate, mortality, free_surrender_grid, nu_fs, step
        ).reserve
    return reserve_with_intensity(
        reference_plan, market_rate, mortality, free_surrender_grid, nu_fs, step
    )


def _conversion_value(fp: FreePolicyPlan, vf_reference: ReserveGrid) -> Callable[[float], float]:
    """V_f(t, t) = f(t) V_f*(t)."""
    f = fp.scaling
    vf = vf_reference.at

    def value(t: float) -> float:
        return f(t) * vf(t)

    return value


def active_reserve_with_free_policy(
    fp: FreePolicyPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    vf_reference: ReserveGrid,
    step: float = DEFAULT_STEP,
) -> ReserveGrid:
    """V_a with both behavioural channels, each driven by its own gain."""
    plan = fp.base_plan
    check_basis(plan, market_rate, mortality, step)
    grid = solver_grid(plan, step)
    grid.require_aligned(surrender_grid, "surrender value grid")
    grid.require_aligned(vf_reference, "free-policy reference grid")
    fp.check_scaling(grid.times)

    base = thiele_rhs(plan, market_rate, mortality)
    g = surrender_grid.at
    conversion = _conversion_value(fp, vf_reference)
    h_as = fp.intensity_as.evaluate
    h_af = fp.intensity_af.evaluate

    def rhs(t: float, v: float) -> float:
        gain = g(t) - v
        converted = conversion(t) - v
        return base(t, v) - h_as(t, gain) * gain - h_af(t, converted) * converted

    return solve_plan(plan, rhs, step)


def active_consistency_check(
    fp: FreePolicyPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    vf_reference: ReserveGrid,
    active: ReserveGrid,
    step: float = DEFAULT_STEP,
) -> float:
    """Freeze both realised intensities and re-solve the linear equation; max node difference."""
    plan = fp.base_plan
    times = active.times
    conversion_values = np.array([fp.scaling(float(t)) for t in times]) * vf_reference.values
    nu_as = ReserveGrid(active.t0, active.step, fp.intensity_as.evaluate_many(
        times, surrender_grid.values - active.values
    ))
    nu_af = ReserveGrid(active.t0, active.step, fp.intensity_af.evaluate_many(
        times, conversion_values - active.values
    ))

    base = thiele_rhs(plan, market_rate, mortality)
    g = surrender_grid.at
    conversion = _conversion_value(fp, vf_reference)

    def rhs(t: float, v: float) -> float:
        return base(t, v) - nu_as.at(t) * (g(t) - v) - nu_af.at(t) * (conversion(t) - v)

    linear = solve_plan(plan, rhs, step)
    return float(abs(linear.values - active.values).max())


@dataclass(frozen=True, eq=False)
class FreePolicySurface:
    """Columns V_f(., u) on [u, n], one per conversion node u."""
    conversion_times: np.ndarray
    columns: tuple[ReserveGrid, ...]

    def column(self, u: float) -> ReserveGrid:
        k = int(np.argmin(abs(self.conversion_times - u)))
        return self.columns[k]

    def diagonal(self) -> np.ndarray:
        """V_f(u, u) at each conversion node."""
        return np.array([col.values[0] for col in self.columns])


def free_policy_surface(
    fp: FreePolicyPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    free_surrender_grid: ReserveGrid,
    step: float = DEFAULT_STEP,
    u_grid_stride: int = DEFAULT_SURFACE_STRIDE,
) -> FreePolicySurface:
    """General free-policy reserve, where h_fs may see the u-dependent gain f(u) G_f - V_f."""
    plan = fp.base_plan
    check_basis(plan, market_rate, mortality, step)
    solver_grid(plan, step).require_aligned(free_surrender_grid, "free-policy surrender value grid")
    steps = grid_steps(0.0, plan.horizon, step)
    if u_grid_stride < 1 or steps % u_grid_stride:
        raise ConfigurationError(
            f"stride {u_grid_stride} does not divide the {steps} grid steps"
        )

    conversion_times = free_surrender_grid.times[::u_grid_stride]
    fp.check_scaling(conversion_times)
    g_f = free_surrender_grid.at
    h_fs = fp.intensity_fs.evaluate
    columns = []
    for u in conversion_times:
        u = float(u)
        factor = fp.scaling(u)
        scaled = plan.scaled(factor)
        if len(columns) == len(conversion_times) - 1:
            columns.append(ReserveGrid(plan.horizon, step, [scaled.terminal_benefit]))
            continue
        base = thiele_rhs(scaled, market_rate, mortality)

        def rhs(t: float, v: float, base=base, factor=factor) -> float:
            gain = factor * g_f(t) - v
            return base(t, v) - h_fs(t, gain) * gain

        columns.append(solve_backward(BackwardProblem(
            rhs=rhs,
            terminal_time=plan.horizon,
            terminal_value=scaled.terminal_benefit,
            start_time=u,
            step=step,
        )))
    logger.info("free-policy surface: %d conversion nodes", len(columns))
    return FreePolicySurface(conversion_times=conversion_times, columns=tuple(columns))
