"""Rationality sweeps: behavioural reserves approaching the worst case.

As theta grows, a family whose intensity vanishes for losing surrenders and
explodes for winning ones drives V_theta up to W. ``theta_sweep`` measures
the gap W - V_theta along a sweep; ``condition_check`` tests the two
envelope conditions that make the limit hold.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import pandas as pd

from thiele.behaviour import solve_reserve_dependent
from thiele.config import CONDITION_GAINS, DEFAULT_STEP
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.errors import ConfigurationError
from thiele.intensities import ExponentialIntensity, IndicatorIntensity, IntensityModel
from thiele.reserves import reserve_no_surrender
from thiele.worst_case import WorstCaseSolution, worst_case_reserve

logger = logging.getLogger(__name__)

# Named psi schedules usable from scenario files
PSI_SCHEDULES: dict[str, Callable[[float], float]] = {
    "exp_sqrt": lambda theta: math.exp(-math.sqrt(theta)),
}


@dataclass(frozen=True)
class SweepFamily:
    """Which family a sweep walks along, and how psi moves with theta."""
    kind: Literal["exponential", "indicator"]
    psi: float = 0.05
    psi_schedule: Callable[[float], float] | str | None = None

    def __post_init__(self):
        if self.kind not in ("exponential", "indicator"):
            raise ConfigurationError(f"cannot sweep the '{self.kind}' family")
        if isinstance(self.psi_schedule, str) and self.psi_schedule not in PSI_SCHEDULES:
            available = ", ".join(PSI_SCHEDULES)
            raise ConfigurationError(
                f"Unknown psi schedule '{self.psi_schedule}'. Available: {available}"
            )

    def psi_at(self, theta: float) -> float:
        if self.psi_schedule is None:
            return self.psi
        schedule = self.psi_schedule
        if isinstance(schedule, str):
            schedule = PSI_SCHEDULES[schedule]
        return schedule(theta)

    def model(self, theta: float) -> IntensityModel:
        if self.kind == "indicator":
            return IndicatorIntensity(theta)
        return ExponentialIntensity(self.psi_at(theta), theta)


@dataclass(frozen=True)
class ConditionReport:
    """Envelope values at -eps and +eps for one theta."""
    theta: float
    upper: dict[float, float] = field(default_factory=dict)  # sup_{y <= -eps} h
    lower: dict[float, float] = field(default_factory=dict)  # inf_{y >= +eps} h


def condition_check(
    family: SweepFamily,
    theta: float,
    gains: Sequence[float] = CONDITION_GAINS,
) -> ConditionReport:
    model = family.model(theta)
    return ConditionReport(
        theta=theta,
        upper={eps: model.upper_envelope(-eps) for eps in gains},
        lower={eps: model.lower_envelope(eps) for eps in gains},
    )


def check_sweep_conditions(family: SweepFamily, thetas: Sequence[float]) -> list[ConditionReport]:
    """Require, for every checked gain, the losing-side envelope to fall towards zero
    and the winning-side envelope to rise along the sweep. A winning-side envelope
    that already sits at the family's ceiling counts as exploding.

    Raises:
        ConfigurationError: naming the first violated condition
    """
    reports = [condition_check(family, theta) for theta in thetas]
    ceiling = family.model(thetas[-1]).ceiling
    for eps in reports[0].upper:
        upper = [r.upper[eps] for r in reports]
        lower = [r.lower[eps] for r in reports]
        falling = all(b <= a for a, b in zip(upper, upper[1:]))
        if not falling or not (upper[-1] == 0.0 or upper[-1] < upper[0]):
            raise ConfigurationError(
                f"vanishing-loss condition violated: sup of h below gain -{eps:g} "
                f"does not decrease to 0 along the sweep ({upper[0]:.4g} -> {upper[-1]:.4g})"
            )
        rising = all(b >= a for a, b in zip(lower, lower[1:]))
        if not rising or not (lower[-1] > lower[0] or lower[-1] >= ceiling):
            raise ConfigurationError(
                f"exploding-gain condition violated: inf of h above gain +{eps:g} "
                f"does not grow along the sweep ({lower[0]:.4g} -> {lower[-1]:.4g})"
            )
    return reports


def theta_sweep(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    family: SweepFamily,
    thetas: Sequence[float],
    step: float = DEFAULT_STEP,
    worst: WorstCaseSolution | None = None,
) -> pd.DataFrame:
    """Gap between W and V_theta for each theta.

    Returns a frame with columns ``theta``, ``sup_error`` (max of W - V_theta
    over every node before the horizon) and ``error_at_0``.
    """
    thetas = [float(theta) for theta in thetas]
    if len(thetas) < 3:
        raise ConfigurationError("a sweep needs at least three values of theta")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ConfigurationError("sweep thetas must be strictly ascending")
    check_sweep_conditions(family, thetas)

    if worst is None:
        baseline = reserve_no_surrender(plan, market_rate, mortality, step)
        worst = worst_case_reserve(plan, market_rate, mortality, surrender_grid, baseline, step)
    w = worst.worst_reserve.values

    rows = []
    for theta in thetas:
        solution = solve_reserve_dependent(
            plan, market_rate, mortality, surrender_grid, family.model(theta), step
        )
        gap = w - solution.reserve.values
        rows.append({
            "theta": theta,
            "sup_error": float(gap[:-1].max()) if len(gap) > 1 else 0.0,
            "error_at_0": float(gap[0]),
        })
        logger.info("theta=%g: sup error %.6g", theta, rows[-1]["sup_error"])
    return pd.DataFrame(rows, columns=["theta", "sup_error", "error_at_0"])
