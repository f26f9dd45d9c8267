"""Pipeline for one scenario: solve every reserve once, then write the enabled outputs."""

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import pandas as pd
from rich.console import Console
from rich.status import Status

from thiele.behaviour import BehaviouralSolution, consistency_check, solve_reserve_dependent
from thiele.config import CONSISTENCY_TOLERANCE, DEFAULT_MC_WORKERS, DEFAULT_OUTPUT_DIR
from thiele.contract import FreePolicyPlan, ReserveGrid
from thiele.convergence import SweepFamily, theta_sweep
from thiele.errors import ConfigurationError, StageError, ThieleError
from thiele.free_policy import (
    active_reserve_with_free_policy,
    free_policy_reference,
    free_policy_surrender_value,
    technical_scaling,
)
from thiele.oracle import (
    IntensityStrategy,
    MonteCarloEstimate,
    SimulationConfig,
    simulate_reserve,
    stop_at_latest_optimal,
)
from thiele.outputs import Output, get_default_outputs
from thiele.reserves import reserve_no_surrender, surrender_value
from thiele.scenarios import Basis, ScenarioSpec
from thiele.worst_case import WorstCaseSolution, worst_case_reserve

logger = logging.getLogger(__name__)


@contextmanager
def stage(name: str):
    """Attribute any engine error raised inside to the pipeline stage ``name``."""
    try:
        yield
    except StageError:
        raise
    except ThieleError as e:
        raise StageError(name, e) from e


@dataclass(frozen=True)
class FreePolicyResult:
    plan: FreePolicyPlan
    free_surrender: ReserveGrid
    reference: ReserveGrid
    active: ReserveGrid


class ScenarioRun:
    """Lazily solved reserves of one scenario; each stage runs at most once."""

    def __init__(
        self, spec: ScenarioSpec, console: Console | None = None, workers: int = DEFAULT_MC_WORKERS
    ):
        self.spec = spec.validate()
        self.step = spec.step
        self.console = console or Console(quiet=True)
        self.workers = workers
        self._status: Status | None = None
        self.residuals: dict[str, float] = {}

    def _show_status(self, message: str) -> None:
        """Show a spinner with the given message."""
        if self._status:
            self._status.stop()
        self._status = Status(message, console=self.console, spinner="dots")
        self._status.start()

    def _hide_status(self) -> None:
        """Hide the current spinner if any."""
        if self._status:
            self._status.stop()
            self._status = None

    @contextmanager
    def _stage(self, name: str, message: str):
        self._show_status(f"{self.spec.name}: {message}...")
        try:
            with stage(name):
                yield
        finally:
            self._hide_status()

    @cached_property
    def basis(self) -> Basis:
        with stage("contract_model"):
            return self.spec.build()

    @cached_property
    def surrender(self) -> ReserveGrid:
        b = self.basis
        with self._stage("reserves_linear", "surrender value"):
            return surrender_value(b.plan, b.technical_rate, b.mortality, self.step)

    @cached_property
    def baseline(self) -> ReserveGrid:
        b = self.basis
        with self._stage("reserves_linear", "market reserve"):
            return reserve_no_surrender(b.plan, b.market_rate, b.mortality, self.step)

    @cached_property
    def solutions(self) -> dict[str, BehaviouralSolution]:
        b = self.basis
        surrender = self.surrender
        solutions = {}
        for key, model in self.spec.models.items():
            with self._stage("surrender_behaviour", f"model {key}"):
                solution = solve_reserve_dependent(
                    b.plan, b.market_rate, b.mortality, surrender, model, self.step
                )
                residual = consistency_check(
                    solution, b.plan, b.market_rate, b.mortality, surrender, self.step
                )
            logger.debug("model %s: U(0)=%.2f, fixed-point residual %.3g", key, solution.reserve.values[0], residual)
            limit = CONSISTENCY_TOLERANCE * max(abs(b.plan.terminal_benefit), 1.0)
            if residual > limit:
                logger.warning(
                    "%s: model %s misses its fixed point by %.3g (limit %.3g); use a finer step",
                    self.spec.name, key, residual, limit,
                )
            self.residuals[key] = residual
            solutions[key] = solution
        return solutions

    def model_columns(self) -> dict[str, ReserveGrid]:
        """Model reserves by column name: gain-independent models first, the zero model left out."""
        fixed, behavioural = {}, {}
        for key, solution in self.solutions.items():
            model = solution.model
            if model.name == "zero":
                continue
            if model.gain_independent:
                fixed[f"V_{key}"] = solution.reserve
            else:
                behavioural[f"V_{key}_model"] = solution.reserve
        return {**fixed, **behavioural}

    @cached_property
    def worst(self) -> WorstCaseSolution:
        b = self.basis
        surrender, baseline = self.surrender, self.baseline
        with self._stage("worst_case", "worst-case reserve"):
            return worst_case_reserve(b.plan, b.market_rate, b.mortality, surrender, baseline, self.step)

    @cached_property
    def sweep_table(self) -> pd.DataFrame:
        b = self.basis
        sweep = self.spec.sweep
        surrender, worst = self.surrender, self.worst
        with self._stage("convergence_lab", f"{sweep.family} sweep"):
            family = SweepFamily(sweep.family, sweep.psi, sweep.psi_schedule)
            return theta_sweep(
                b.plan, b.market_rate, b.mortality, surrender, family, sweep.thetas, self.step, worst
            )

    @cached_property
    def simulations(self) -> dict[str, tuple[MonteCarloEstimate, float]]:
        """Monte Carlo estimate and ODE value at time 0, per model and for the worst case."""
        b = self.basis
        surrender, worst = self.surrender, self.worst
        config = SimulationConfig(paths=self.spec.mc_paths, seed=self.spec.seed, workers=self.workers)
        results = {}
        strategies = [
            (f"model_{key}", IntensityStrategy(solution.realized_intensity), float(solution.reserve.values[0]))
            for key, solution in self.solutions.items()
        ]
        strategies.append(("W", stop_at_latest_optimal(worst), float(worst.worst_reserve.values[0])))
        for label, strategy, ode_value in strategies:
            with self._stage("validation_oracle", f"simulating {label}"):
                estimate = simulate_reserve(
                    b.plan, b.market_rate, b.mortality, surrender, strategy, config
                )
            results[label] = (estimate, ode_value)
        return results

    @cached_property
    def free_policy(self) -> FreePolicyResult:
        b = self.basis
        fp_spec = self.spec.free_policy
        surrender = self.surrender
        with self._stage("free_policy", "free-policy reserves"):
            free_surrender = free_policy_surrender_value(b.plan, b.technical_rate, b.mortality, self.step)
            plan = FreePolicyPlan(
                base_plan=b.plan,
                scaling=technical_scaling(surrender, free_surrender),
                intensity_as=fp_spec.surrender,
                intensity_af=fp_spec.conversion,
                intensity_fs=fp_spec.free_surrender,
            )
            reference = free_policy_reference(
                b.plan, b.market_rate, b.mortality, free_surrender, fp_spec.free_surrender, self.step
            )
            active = active_reserve_with_free_policy(
                plan, b.market_rate, b.mortality, surrender, reference, self.step
            )
        return FreePolicyResult(plan, free_surrender, reference, active)

    def summary(self) -> dict[str, float]:
        """Values at time 0 of every reserve solved so far."""
        values = {"G": self.surrender.values[0], "V_d": self.baseline.values[0]}
        if "solutions" in self.__dict__:
            values.update({name: grid.values[0] for name, grid in self.model_columns().items()})
        if "worst" in self.__dict__:
            values["W"] = self.worst.worst_reserve.values[0]
            values["u_star"] = self.worst.latest_optimal.values[0]
        if "free_policy" in self.__dict__:
            values["V_a (free policy)"] = self.free_policy.active.values[0]
        return {name: float(v) for name, v in values.items()}

    def write(self, directory: str | Path, outputs: list[Output] | None = None) -> list[Path]:
        """Write every output the scenario enables; returns the written paths in output order."""
        directory = Path(directory) / self.spec.name
        outputs = outputs if outputs is not None else get_default_outputs()
        paths = []
        for output in outputs:
            if output.name not in self.spec.outputs:
                continue
            paths.append(output.write(self, directory))
            logger.info("%s: wrote %s", self.spec.name, paths[-1])
        return paths


def run(
    spec: ScenarioSpec,
    out_dir: str | Path = DEFAULT_OUTPUT_DIR,
    console: Console | None = None,
    outputs: list[Output] | None = None,
) -> list[Path]:
    """Run one scenario end to end and return the CSV files it wrote."""
    return ScenarioRun(spec, console=console).write(out_dir, outputs)


def run_batch(
    specs: list[ScenarioSpec],
    out_dir: str | Path = DEFAULT_OUTPUT_DIR,
    console: Console | None = None,
    outputs: list[Output] | None = None,
    workers: int = DEFAULT_MC_WORKERS,
) -> list[tuple[ScenarioRun, list[Path]]]:
    """Run several scenarios, ``workers`` at a time; results come back in input order.

    ``workers`` also sizes each scenario's Monte Carlo pool. Concurrent runs
    share one spinner, since a console shows a single live display.
    """
    if workers < 1:
        raise ConfigurationError(f"need at least one worker, got {workers}")
    if workers == 1 or len(specs) < 2:
        runs = [ScenarioRun(spec, console=console, workers=workers) for spec in specs]
        return [(r, r.write(out_dir, outputs)) for r in runs]

    runs = [ScenarioRun(spec, workers=workers) for spec in specs]
    console = console or Console(quiet=True)
    with console.status(f"running {len(runs)} scenarios...", spinner="dots"):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            written = list(pool.map(lambda r: r.write(out_dir, outputs), runs))
    return list(zip(runs, written))
