"""Monte Carlo valuation of a surrender strategy, independent of the ODE solvers.

Paths are simulated from time 0: death arrives with intensity mu and, for an
intensity strategy, surrender with intensity nu. Exit times are drawn exactly
by thinning a piecewise-constant majorant of mu + nu; the cause of exit is
then death with probability mu / (mu + nu). A stopping strategy surrenders
deterministically at its stop time if the policy is still in force.

Each path contributes the discounted payments: premiums while in force, the
death benefit at death, G at surrender, the terminal benefit at maturity.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from thiele.config import (
    DEFAULT_ENVELOPE_BLOCK,
    DEFAULT_MC_BATCH,
    DEFAULT_MC_PATHS,
    DEFAULT_MC_TIME_STEP,
    DEFAULT_MC_WORKERS,
    DEFAULT_SEED,
)
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, ReserveGrid
from thiele.errors import DomainError
from thiele.worst_case import WorstCaseSolution

logger = logging.getLogger(__name__)

# Majorant floor, keeps the cumulative majorant strictly increasing
_RATE_FLOOR = 1e-12


@dataclass(frozen=True)
class SimulationConfig:
    paths: int = DEFAULT_MC_PATHS
    seed: int = DEFAULT_SEED
    time_step: float = DEFAULT_MC_TIME_STEP
    batch_size: int = DEFAULT_MC_BATCH
    workers: int = DEFAULT_MC_WORKERS

    def __post_init__(self):
        if self.paths < 1:
            raise DomainError(f"need at least one path, got {self.paths}")
        if not self.time_step > 0:
            raise DomainError(f"time step must be positive, got {self.time_step}")
        if self.batch_size < 1:
            raise DomainError(f"batch size must be positive, got {self.batch_size}")
        if self.workers < 1:
            raise DomainError(f"need at least one worker, got {self.workers}")


@dataclass(frozen=True)
class IntensityStrategy:
    """Surrender at the deterministic intensity stored on a grid (e.g. a solved h(t, U(t)))."""
    intensity: ReserveGrid


@dataclass(frozen=True)
class StoppingStrategy:
    """Surrender at ``stop_time`` if still in force; ``stop_time`` at the horizon means never."""
    stop_time: float


Strategy = IntensityStrategy | StoppingStrategy


def stop_at_latest_optimal(solution: WorstCaseSolution) -> StoppingStrategy:
    """Deterministic stop at u*(t0)."""
    return StoppingStrategy(float(solution.latest_optimal.values[0]))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    standard_error: float
    paths: int

    def z_score(self, reference: float) -> float:
        difference = self.estimate - reference
        if self.standard_error == 0.0:
            return 0.0 if difference == 0.0 else math.copysign(math.inf, difference)
        return difference / self.standard_error


class _PathModel:
    """Everything a batch needs, precomputed on the simulation grid."""

    def __init__(self, plan, market_rate, mortality, surrender_grid, strategy, config):
        horizon = plan.horizon
        steps = max(1, math.ceil(horizon / config.time_step - 1e-9))
        self.plan = plan
        self.market_rate = market_rate
        self.mortality = mortality
        self.surrender_grid = surrender_grid
        self.horizon = horizon
        self.times = np.linspace(0.0, horizon, steps + 1)

        discount = np.exp(-market_rate.cumulative(self.times))
        premiums = np.array([plan.premium_intensity(float(t)) for t in self.times]) * discount
        increments = 0.5 * (premiums[1:] + premiums[:-1]) * np.diff(self.times)
        self.premium_value = np.concatenate(([0.0], np.cumsum(increments)))

        if isinstance(strategy, IntensityStrategy):
            self.nu = strategy.intensity
            self.stop_time = horizon
        else:
            self.nu = None
            self.stop_time = min(max(strategy.stop_time, 0.0), horizon)

        blocks = max(1, math.ceil(horizon / DEFAULT_ENVELOPE_BLOCK - 1e-9))
        self.edges = np.linspace(0.0, horizon, blocks + 1)
        self.majorant = self._majorant()
        self.cumulative = np.concatenate(
            ([0.0], np.cumsum(self.majorant * np.diff(self.edges)))
        )

    def _nu(self, t: np.ndarray) -> np.ndarray:
        if self.nu is None:
            return np.zeros_like(t)
        return self.nu.at_many(t)

    def _majorant(self) -> np.ndarray:
        points = np.union1d(self.times, self.edges)
        if self.nu is not None:
            nodes = self.nu.times
            points = np.union1d(points, nodes[(nodes >= 0) & (nodes <= self.horizon)])
        hazard = self.mortality.evaluate(points) + self._nu(points)
        block = np.clip(np.searchsorted(self.edges, points, side="right") - 1, 0, len(self.edges) - 2)
        majorant = np.zeros(len(self.edges) - 1)
        np.maximum.at(majorant, block, hazard)
        # a node on a block edge bounds the block to its left as well
        on_edge = np.isin(points, self.edges[1:-1])
        np.maximum.at(majorant, block[on_edge] - 1, hazard[on_edge])
        return np.maximum(majorant * (1.0 + 1e-12), _RATE_FLOOR)

    def exit_times(self, rng: np.random.Generator, paths: int) -> tuple[np.ndarray, np.ndarray]:
        """First accepted event time per path (inf if none) and whether it was a death."""
        exit_time = np.full(paths, np.inf)
        is_death = np.zeros(paths, dtype=bool)
        position = np.zeros(paths)
        pending = np.arange(paths)
        total = self.cumulative[-1]
        while pending.size:
            position[pending] += rng.exponential(size=pending.size)
            inside = position[pending] < total
            pending = pending[inside]
            if not pending.size:
                break
            t = np.interp(position[pending], self.cumulative, self.edges)
            block = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.majorant) - 1)
            mu = self.mortality.evaluate(t)
            nu = self._nu(t)
            accept = rng.random(pending.size) * self.majorant[block] <= mu + nu
            cause = rng.random(pending.size) * (mu + nu) <= mu
            accepted = pending[accept]
            exit_time[accepted] = t[accept]
            is_death[accepted] = cause[accept]
            pending = pending[~accept]
        return exit_time, is_death

    def values(self, exit_time: np.ndarray, is_death: np.ndarray) -> np.ndarray:
        stop = self.stop_time
        surrendered = (exit_time < self.horizon) & ~is_death
        died = (exit_time < self.horizon) & is_death
        if stop < self.horizon:
            stopped = exit_time >= stop
            surrendered = surrendered | stopped
            died = died & ~stopped
            exit_time = np.where(stopped, stop, exit_time)
        matured = ~(surrendered | died)
        end = np.where(matured, self.horizon, exit_time)

        discount = np.exp(-self.market_rate.cumulative(end))
        payment = np.full(end.shape, float(self.plan.terminal_benefit))
        if died.any():
            payment[died] = np.vectorize(self.plan.death_benefit, otypes=[float])(end[died])
        if surrendered.any():
            payment[surrendered] = self.surrender_grid.at_many(end[surrendered])
        return discount * payment - np.interp(end, self.times, self.premium_value)


def simulate_reserve(
    plan: PaymentPlan,
    market_rate: RateCurve,
    mortality: MortalityCurve,
    surrender_grid: ReserveGrid,
    strategy: Strategy,
    config: SimulationConfig = SimulationConfig(),
) -> MonteCarloEstimate:
    """Estimate the reserve at time 0 under ``strategy``; deterministic given the config."""
    model = _PathModel(plan, market_rate, mortality, surrender_grid, strategy, config)
    batches = -(-config.paths // config.batch_size)
    seeds = np.random.SeedSequence(config.seed).spawn(batches)
    sizes = [config.batch_size] * (batches - 1) + [config.paths - config.batch_size * (batches - 1)]

    def moments(seed: np.random.SeedSequence, size: int) -> tuple[int, float, float]:
        rng = np.random.default_rng(seed)
        values = model.values(*model.exit_times(rng, size))
        batch_mean = float(values.mean())
        return size, batch_mean, float(np.square(values - batch_mean).sum())

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(moments, seeds, sizes))

    # running mean and sum of squared deviations, merged batch by batch in seed order
    count, mean, squares = 0, 0.0, 0.0
    for size, batch_mean, batch_squares in results:
        delta = batch_mean - mean
        total = count + size
        mean += delta * size / total
        squares += batch_squares + delta * delta * count * size / total
        count = total
        logger.debug("batch of %d paths: mean %.6g", size, batch_mean)

    variance = squares / (count - 1) if count > 1 else 0.0
    return MonteCarloEstimate(
        estimate=mean,
        standard_error=math.sqrt(variance / config.paths),
        paths=config.paths,
    )
