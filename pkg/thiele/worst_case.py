"""Worst-case reserve: the supremum over surrender strategies.

With D(t, u) = exp(-int_t^u (r + mu)), the worst case is

    W(t) = V(t) + M(t),   M(t) = max over u in [t, n] of D(t, u) (G(u) - V(u)),

where the candidate u = n (never surrender) contributes zero. On the grid M
is a Snell envelope computed by one backward pass; ``brute_force_worst_case``
evaluates the maximum directly and serves as its oracle.
"""

import logging
from dataclasses import dataclass

import numpy as np

from thiele.config import DEFAULT_STEP, TIE_TOLERANCE
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.reserves import check_basis, solver_grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WorstCaseSolution:
    worst_reserve: ReserveGrid
    latest_optimal: ReserveGrid
    gain_envelope: ReserveGrid

    def u_star(self, t: float) -> float:
        """Latest optimal surrender time seen from grid node ``t``."""
        grid = self.latest_optimal
        return float(grid.values[int(round((t - grid.t0) / grid.step))])


def _inputs(plan, market_rate, mortality, surrender_grid, baseline, step, start):
    check_basis(plan, market_rate, mortality, step)
    grid = solver_grid(plan, step, start)
    grid.require_aligned(surrender_grid, "surrender value grid")
    grid.require_aligned(baseline, "baseline reserve grid")
    times = grid.times
    log_discount = market_rate.integrate_steps(times) + mortality.integrate_steps(times)
    gain = surrender_grid.values - baseline.values
    return grid, times, log_discount, gain


def _solution(baseline: ReserveGrid, envelope: np.ndarray, latest: np.ndarray) -> WorstCaseSolution:
    return WorstCaseSolution(
        worst_reserve=ReserveGrid(baseline.t0, baseline.step, baseline.values + envelope),
        latest_optimal=ReserveGrid(baseline.t0, baseline.step, latest),
        gain_envelope=ReserveGrid(baseline.t0, baseline.step, envelope),
    )


def worst_case_reserve(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    baseline: ReserveGrid,
    step: float = DEFAULT_STEP,
) -> WorstCaseSolution:
    """Backward recursion M_i = max(G_i - V_i, d_i M_{i+1}), M_n = 0.

    ``baseline`` is the no-surrender reserve on the same grid. Ties go to the
    later time, so u* is the latest optimal surrender time.
    """
    grid, times, log_discount, gain = _inputs(
        plan, market_rate, mortality, surrender_grid, baseline, step, surrender_grid.t0
    )
    n = len(grid) - 1
    discount = np.exp(-log_discount).tolist()
    gains = gain.tolist()
    envelope = [0.0] * (n + 1)
    latest = [0.0] * (n + 1)
    latest[n] = float(times[n])
    for i in range(n - 1, -1, -1):
        continuation = discount[i] * envelope[i + 1]
        immediate = gains[i]
        scale = max(abs(immediate), abs(continuation))
        if immediate - continuation > TIE_TOLERANCE * scale:
            envelope[i] = immediate
            latest[i] = float(times[i])
        else:
            envelope[i] = max(immediate, continuation)
            latest[i] = latest[i + 1]
    logger.debug("worst case: M(t0)=%.2f, u*(t0)=%.4f", envelope[0], latest[0])
    return _solution(baseline, np.array(envelope), np.array(latest))


def brute_force_worst_case(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    baseline: ReserveGrid,
    step: float = DEFAULT_STEP,
) -> WorstCaseSolution:
    """Exhaustive search of the discounted gain over every grid candidate u >= t."""
    grid, times, log_discount, gain = _inputs(
        plan, market_rate, mortality, surrender_grid, baseline, step, surrender_grid.t0
    )
    n = len(grid) - 1
    cumulative = np.concatenate(([0.0], np.cumsum(log_discount)))
    candidates = gain.copy()
    candidates[n] = 0.0
    envelope = np.zeros(n + 1)
    latest = np.full(n + 1, times[n])
    for i in range(n):
        values = np.exp(cumulative[i] - cumulative[i:]) * candidates[i:]
        best = values.max()
        near = np.flatnonzero(values >= best - TIE_TOLERANCE * abs(best))
        envelope[i] = best
        latest[i] = times[i + near[-1]]
    return _solution(baseline, envelope, latest)
