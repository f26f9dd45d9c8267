"""Contract, curve and grid types shared by every solver."""

import bisect
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from thiele.config import GRID_TOLERANCE
from thiele.errors import ConfigurationError, DomainError
from thiele.intensities.base import IntensityModel

Payment = Callable[[float], float]

# Gauss-Legendre nodes and weights on [-1, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(3)


def grid_steps(start: float, end: float, step: float) -> int:
    """Number of steps of size ``step`` covering [start, end].

    Raises ConfigurationError unless the span is a whole number of steps.
    """
    if step <= 0:
        raise ConfigurationError(f"step must be positive, got {step}")
    ratio = (end - start) / step
    steps = round(ratio)
    if steps < 0 or abs(ratio - steps) > GRID_TOLERANCE * max(1.0, abs(ratio)):
        raise ConfigurationError(
            f"[{start}, {end}] is not a whole number of steps of {step}"
        )
    return steps


@dataclass(frozen=True)
class ConstantPayment:
    """A payment function that does not depend on time."""
    value: float

    def __call__(self, t: float) -> float:
        return self.value


@dataclass(frozen=True)
class ScaledPayment:
    """``factor`` times another payment function."""
    base: Payment
    factor: float

    def __call__(self, t: float) -> float:
        return self.factor * self.base(t)


@dataclass(frozen=True)
class PaymentPlan:
    """Premium intensity, death benefit and terminal benefit of one contract."""
    premium_intensity: Payment
    death_benefit: Payment
    terminal_benefit: float
    horizon: float

    def __post_init__(self):
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if not math.isfinite(self.terminal_benefit):
            raise DomainError("terminal benefit must be finite")
        for t in np.linspace(0.0, self.horizon, 61):
            t = float(t)
            if not (math.isfinite(self.premium_intensity(t)) and math.isfinite(self.death_benefit(t))):
                raise DomainError(f"payments are not finite at t={t}")

    @classmethod
    def constant(
        cls,
        premium: float,
        death_benefit: float,
        terminal_benefit: float,
        horizon: float,
    ) -> "PaymentPlan":
        return cls(
            premium_intensity=ConstantPayment(premium),
            death_benefit=ConstantPayment(death_benefit),
            terminal_benefit=terminal_benefit,
            horizon=horizon,
        )

    def premium_free(self) -> "PaymentPlan":
        """The same benefits with no premiums (the free-policy reference plan)."""
        return replace(self, premium_intensity=ConstantPayment(0.0))

    def scaled(self, factor: float) -> "PaymentPlan":
        """Premium-free plan with benefits scaled by ``factor``."""
        return PaymentPlan(
            premium_intensity=ConstantPayment(0.0),
            death_benefit=ScaledPayment(self.death_benefit, factor),
            terminal_benefit=factor * self.terminal_benefit,
            horizon=self.horizon,
        )


@dataclass(frozen=True)
class RateCurve:
    """Piecewise-constant interest intensity.

    ``breakpoints[k]`` is the start of segment k; segments are right-open and
    the last one runs to ``end``.
    """
    breakpoints: tuple[float, ...]
    rates: tuple[float, ...]
    end: float

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if not self.breakpoints or self.breakpoints[0] != 0.0:
            raise DomainError("rate curve must start at 0")
        if len(self.breakpoints) != len(self.rates):
            raise DomainError("rate curve needs one rate per segment")
        if any(a >= b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise DomainError("rate curve breakpoints must be strictly ascending")
        if self.breakpoints[-1] >= self.end:
            raise DomainError("rate curve breakpoints must lie before its end")
        if not all(math.isfinite(r) for r in self.rates):
            raise DomainError("rates must be finite")

    @classmethod
    def flat(cls, rate: float, end: float) -> "RateCurve":
        return cls((0.0,), (rate,), end)

    @classmethod
    def step(cls, before: float, after: float, switch: float, end: float) -> "RateCurve":
        """``before`` on [0, switch), ``after`` on [switch, end]."""
        return cls((0.0, switch), (before, after), end)

    def _check_time(self, t: float) -> None:
        slack = GRID_TOLERANCE * max(1.0, self.end)
        if not (-slack <= t <= self.end + slack):
            raise DomainError(f"t={t} outside rate curve domain [0, {self.end}]")

    def evaluate(self, t: float) -> float:
        """Rate of the segment containing t."""
        self._check_time(t)
        k = max(bisect.bisect_right(self.breakpoints, t) - 1, 0)
        return self.rates[k]

    __call__ = evaluate

    def evaluate_many(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        index = np.clip(np.searchsorted(self.breakpoints, times, side="right") - 1, 0, None)
        return np.asarray(self.rates)[index]

    def integrate(self, a: float, b: float) -> float:
        """Exact integral of the rate over [a, b]."""
        if b < a:
            raise DomainError(f"reversed interval [{a}, {b}]")
        self._check_time(a)
        self._check_time(b)
        total = 0.0
        edges = self.breakpoints[1:] + (math.inf,)
        for start, stop, rate in zip(self.breakpoints, edges, self.rates):
            lo, hi = max(a, start), min(b, stop)
            if hi > lo:
                total += (hi - lo) * rate
        return total

    def cumulative(self, times: np.ndarray) -> np.ndarray:
        """Vectorised integral of the rate over [0, t]."""
        times = np.asarray(times, dtype=float)
        starts = np.asarray(self.breakpoints)
        rates = np.asarray(self.rates)
        lengths = np.diff(np.append(starts, self.end))
        at_start = np.concatenate(([0.0], np.cumsum(lengths[:-1] * rates[:-1])))
        index = np.clip(np.searchsorted(starts, times, side="right") - 1, 0, None)
        return at_start[index] + rates[index] * (times - starts[index])

    def integrate_steps(self, times: np.ndarray) -> np.ndarray:
        """Integrals over consecutive intervals [times[i], times[i+1]]."""
        return np.diff(self.cumulative(times))

    def check_grid(self, step: float, horizon: float) -> None:
        """Require every breakpoint to be a grid node and the curve to cover the horizon."""
        if self.end + GRID_TOLERANCE * max(1.0, self.end) < horizon:
            raise ConfigurationError(
                f"rate curve ends at {self.end}, before the horizon {horizon}"
            )
        for b in self.breakpoints[1:]:
            if b < horizon:
                try:
                    grid_steps(0.0, b, step)
                except ConfigurationError:
                    raise ConfigurationError(
                        f"rate breakpoint {b} is not a multiple of the step {step}"
                    ) from None


def integrate_rate(curve: RateCurve, a: float, b: float) -> float:
    """Integral of ``curve`` over [a, b], summed segment by segment."""
    return curve.integrate(a, b)


@dataclass(frozen=True)
class MortalityCurve:
    """Makeham death intensity ``base + 10**(log_scale + log_slope*(t + age_offset))``."""
    base: float
    log_scale: float
    log_slope: float
    age_offset: float

    @classmethod
    def zero(cls) -> "MortalityCurve":
        return cls(0.0, -math.inf, 0.0, 0.0)

    def evaluate(self, t):
        """Works on floats and on numpy arrays."""
        return self.base + 10.0 ** (self.log_scale + self.log_slope * (t + self.age_offset))

    __call__ = evaluate

    def integrate(self, a: float, b: float) -> float:
        return float(self.integrate_steps(np.array([a, b]))[0])

    def integrate_steps(self, times: np.ndarray) -> np.ndarray:
        """3-point Gauss-Legendre integral over each [times[i], times[i+1]]."""
        times = np.asarray(times, dtype=float)
        lo, hi = times[:-1], times[1:]
        half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        return half * (self.evaluate(nodes) @ _GL_WEIGHTS)

    def validate(self, horizon: float) -> None:
        values = self.evaluate(np.linspace(0.0, horizon, 301))
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("death intensity must be finite and non-negative on the horizon")


def g82_female() -> MortalityCurve:
    """Danish G82 female death intensity, age 35 at time 0."""
    return MortalityCurve(base=0.0005, log_scale=5.728 - 10, log_slope=0.038, age_offset=35.0)


@dataclass(frozen=True, eq=False)
class ReserveGrid:
    """Values on the uniform grid ``t0 + i*step``; the last node is the horizon."""
    t0: float
    step: float
    values: np.ndarray
    _nodes: list = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("a grid needs a one-dimensional, non-empty list of values")
        if not self.step > 0:
            raise DomainError(f"grid step must be positive, got {self.step}")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_nodes", values.tolist())

    def __len__(self) -> int:
        return len(self._nodes)

    @property
    def horizon(self) -> float:
        return self.t0 + (len(self) - 1) * self.step

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(len(self))

    def at(self, t: float) -> float:
        """Linear interpolation between nodes; flat outside the grid."""
        nodes = self._nodes
        if len(nodes) == 1:
            return nodes[0]
        x = (t - self.t0) / self.step
        if x <= 0:
            return nodes[0]
        i = int(x)
        if i >= len(nodes) - 1:
            return nodes[-1]
        w = x - i
        return nodes[i] + w * (nodes[i + 1] - nodes[i])

    __call__ = at

    def at_many(self, times: np.ndarray) -> np.ndarray:
        return np.interp(times, self.times, self.values)

    def aligned(self, other: "ReserveGrid") -> bool:
        tol = GRID_TOLERANCE * max(1.0, abs(self.horizon))
        return (
            len(self) == len(other)
            and abs(self.t0 - other.t0) <= tol
            and abs(self.step - other.step) <= GRID_TOLERANCE * self.step
        )

    def require_aligned(self, other: "ReserveGrid", what: str = "grid") -> None:
        if not self.aligned(other):
            raise ConfigurationError(
                f"{what} is not aligned with the solver grid "
                f"(t0={other.t0}, step={other.step}, nodes={len(other)}; "
                f"expected t0={self.t0}, step={self.step}, nodes={len(self)})"
            )

    def restrict(self, start: float) -> "ReserveGrid":
        """The part of the grid from node ``start`` to the horizon."""
        offset = grid_steps(self.t0, start, self.step)
        return ReserveGrid(self.t0 + offset * self.step, self.step, self.values[offset:])

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ReserveGrid":
        return ReserveGrid(self.t0, self.step, fn(self.values))

    @classmethod
    def shape_of(cls, start: float, end: float, step: float) -> "ReserveGrid":
        """A zero grid with the given geometry, used for alignment checks."""
        return cls(start, step, np.zeros(grid_steps(start, end, step) + 1))


@dataclass(frozen=True)
class FreePolicyPlan:
    """Contract with surrender and conversion into a free (paid-up) policy."""
    base_plan: PaymentPlan
    scaling: Callable[[float], float]
    intensity_as: IntensityModel
    intensity_af: IntensityModel
    intensity_fs: IntensityModel

    def check_scaling(self, times: np.ndarray) -> None:
        for u in np.asarray(times, dtype=float):
            f = self.scaling(float(u))
            if not 0.0 < f <= 1.0:
                raise DomainError(f"scaling f({u}) = {f} is outside (0, 1]")
