"""Fixed-step backward Runge-Kutta integration of terminal-value problems.

Every reserve in the package is the solution of ``V'(t) = F(t, V(t))`` with
the value at the horizon given. ``solve_backward`` marches the classical
4-stage scheme from the terminal time down to the start time on the uniform
grid ``start_time + i*step``.

Stage times at the two ends of a step are moved a tiny fraction of the step
into its interior, so a piecewise-constant curve is always read on the
segment the step belongs to, even when a breakpoint sits on a grid node.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from thiele.config import DEFAULT_STEP
from thiele.contract import ReserveGrid, grid_steps
from thiele.errors import ConfigurationError, NumericalError

logger = logging.getLogger(__name__)

# Fraction of a step by which end-point stages are moved inside the step
_ENDPOINT_INSET = 1e-9


@dataclass(frozen=True)
class BackwardProblem:
    """``V' = rhs(t, V)`` on [start_time, terminal_time] with V(terminal_time) given.

    ``terminal_value`` is a float for scalar problems and a length-2 sequence
    for ``solve_backward_pair``.
    """
    rhs: Callable
    terminal_time: float
    terminal_value: float | Sequence[float]
    start_time: float = 0.0
    step: float = DEFAULT_STEP

    def __post_init__(self):
        if not self.start_time < self.terminal_time:
            raise ConfigurationError(
                f"start time {self.start_time} must precede terminal time {self.terminal_time}"
            )
        grid_steps(self.start_time, self.terminal_time, self.step)

    @property
    def steps(self) -> int:
        return grid_steps(self.start_time, self.terminal_time, self.step)


def _finite(value) -> bool:
    if isinstance(value, float):
        return math.isfinite(value)
    return bool(np.all(np.isfinite(value)))


def _march(problem: BackwardProblem, y):
    """Run the scheme; returns node values ordered from start to horizon."""
    rhs = problem.rhs
    h = problem.step
    n = problem.steps
    start = problem.start_time
    inset = _ENDPOINT_INSET * h
    half = 0.5 * h
    sixth = h / 6.0

    values = [y]
    for i in range(n, 0, -1):
        a = start + (i - 1) * h
        b = start + i * h if i < n else problem.terminal_time
        mid = a + half
        k1 = rhs(b - inset, y)
        if not _finite(k1):
            raise NumericalError(f"right-hand side is not finite at t={b}", time=b)
        k2 = rhs(mid, y - half * k1)
        if not _finite(k2):
            raise NumericalError(f"right-hand side is not finite at t={mid}", time=mid)
        k3 = rhs(mid, y - half * k2)
        if not _finite(k3):
            raise NumericalError(f"right-hand side is not finite at t={mid}", time=mid)
        k4 = rhs(a + inset, y - h * k3)
        if not _finite(k4):
            raise NumericalError(f"right-hand side is not finite at t={a}", time=a)
        y = y - sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        values.append(y)
    values.reverse()
    return values


def solve_backward(problem: BackwardProblem) -> ReserveGrid:
    """Solve a scalar terminal-value problem; the last node holds the terminal value."""
    logger.debug(
        "solving [%s, %s] in %d steps", problem.start_time, problem.terminal_time, problem.steps
    )
    values = _march(problem, float(problem.terminal_value))
    return ReserveGrid(problem.start_time, problem.step, np.array(values))


def solve_backward_pair(problem: BackwardProblem) -> tuple[ReserveGrid, ReserveGrid]:
    """Solve a coupled two-component problem; ``rhs`` receives and returns 2-vectors."""
    terminal = np.asarray(problem.terminal_value, dtype=float)
    if terminal.shape != (2,):
        raise ConfigurationError(f"pair problems need two terminal values, got {terminal.shape}")
    values = np.array(_march(problem, terminal))
    return (
        ReserveGrid(problem.start_time, problem.step, values[:, 0]),
        ReserveGrid(problem.start_time, problem.step, values[:, 1]),
    )
