"""Scenario definitions: the four market examples and surrender models a-e as data."""

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from thiele.config import (
    DEFAULT_MC_PATHS,
    DEFAULT_SEED,
    DEFAULT_EXPONENTIAL_SWEEP_THETAS,
    DEFAULT_STEP,
    DEFAULT_SURFACE_STRIDE,
    DEFAULT_SWEEP_THETAS,
    GRID_TOLERANCE,
)
from thiele.contract import MortalityCurve, PaymentPlan, RateCurve, g82_female
from thiele.errors import ConfigurationError, ThieleError
from thiele.intensities import (
    ConstantIntensity,
    ExponentialIntensity,
    IndicatorIntensity,
    IntensityModel,
    ZeroIntensity,
    intensity_from_dict,
)

# Output toggles a scenario may enable
OUTPUT_KINDS = ("grids", "worst_case", "theta_sweep", "monte_carlo", "free_policy")
DEFAULT_OUTPUTS = ("grids", "worst_case", "theta_sweep", "monte_carlo")

MORTALITY_PRESETS = {
    "g82_female": g82_female,
    "zero": MortalityCurve.zero,
}

_MORTALITY_FIELDS = {"base", "log_scale", "log_slope", "age_offset"}


@dataclass(frozen=True)
class PlanSpec:
    premium: float = 7_000.0
    death_benefit: float = 1_000_000.0
    terminal_benefit: float = 2_000_000.0
    horizon: float = 30.0

    def build(self) -> PaymentPlan:
        return PaymentPlan.constant(self.premium, self.death_benefit, self.terminal_benefit, self.horizon)


@dataclass(frozen=True)
class RateSpec:
    """Segment starts and rates; the last segment runs to the horizon."""
    breakpoints: tuple[float, ...] = (0.0,)
    rates: tuple[float, ...] = (0.05,)

    def build(self, horizon: float) -> RateCurve:
        return RateCurve(self.breakpoints, self.rates, horizon)


def default_sweep_thetas(family: str) -> tuple[float, ...]:
    return DEFAULT_EXPONENTIAL_SWEEP_THETAS if family == "exponential" else DEFAULT_SWEEP_THETAS


@dataclass(frozen=True)
class SweepSpec:
    family: str = "indicator"
    thetas: tuple[float, ...] | None = None  # None: the family's default sweep
    psi: float = 0.05
    psi_schedule: str | None = None

    def __post_init__(self):
        thetas = default_sweep_thetas(self.family) if self.thetas is None else self.thetas
        object.__setattr__(self, "thetas", tuple(float(theta) for theta in thetas))


@dataclass(frozen=True)
class FreePolicySpec:
    """Behaviour of an active policy that may also convert to a free policy."""
    surrender: IntensityModel = field(default_factory=lambda: ConstantIntensity(0.05))
    conversion: IntensityModel = field(default_factory=lambda: ConstantIntensity(0.02))
    free_surrender: IntensityModel = field(default_factory=lambda: ConstantIntensity(0.05))
    stride: int = DEFAULT_SURFACE_STRIDE


@dataclass(frozen=True)
class Basis:
    """The built objects one scenario is solved on."""
    plan: PaymentPlan
    technical_rate: RateCurve
    market_rate: RateCurve
    mortality: MortalityCurve


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str = ""
    plan: PlanSpec = field(default_factory=PlanSpec)
    technical_rate: RateSpec = field(default_factory=RateSpec)
    market_rate: RateSpec = field(default_factory=RateSpec)
    mortality: str | dict = "g82_female"
    models: dict[str, IntensityModel] = field(default_factory=dict)
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    step: float = DEFAULT_STEP
    sweep: SweepSpec = field(default_factory=SweepSpec)
    mc_paths: int = DEFAULT_MC_PATHS
    seed: int = DEFAULT_SEED
    free_policy: FreePolicySpec | None = None

    def problems(self) -> list[str]:
        """Every violated field, one message each."""
        problems = []
        if not self.name or not self.name.strip():
            problems.append("name: must not be empty")
        step_ok = isinstance(self.step, (int, float)) and math.isfinite(self.step) and self.step > 0
        if not step_ok:
            problems.append(f"step: must be positive, got {self.step!r}")
        horizon = self.plan.horizon
        if not horizon > 0:
            problems.append(f"plan.horizon: must be positive, got {horizon}")
        elif step_ok and not _on_grid(horizon, self.step):
            problems.append(f"plan.horizon: {horizon} is not a multiple of step {self.step}")
        for attr in ("premium", "death_benefit", "terminal_benefit"):
            if not math.isfinite(getattr(self.plan, attr)):
                problems.append(f"plan.{attr}: must be finite")

        for label, spec in (("technical_rate", self.technical_rate), ("market_rate", self.market_rate)):
            problems.extend(_rate_problems(label, spec, horizon, self.step if step_ok else None))

        if isinstance(self.mortality, str):
            if self.mortality not in MORTALITY_PRESETS:
                available = ", ".join(MORTALITY_PRESETS)
                problems.append(f"mortality: unknown preset '{self.mortality}' (available: {available})")
        elif not isinstance(self.mortality, dict) or set(self.mortality) != _MORTALITY_FIELDS:
            problems.append(f"mortality: expected a preset name or fields {sorted(_MORTALITY_FIELDS)}")

        for key, model in self.models.items():
            if not isinstance(model, IntensityModel):
                problems.append(f"models.{key}: not an intensity model")

        if not self.outputs:
            problems.append("outputs: at least one output must be enabled")
        for output in self.outputs:
            if output not in OUTPUT_KINDS:
                problems.append(f"outputs: unknown output '{output}' (available: {', '.join(OUTPUT_KINDS)})")

        if "theta_sweep" in self.outputs:
            thetas = self.sweep.thetas
            if self.sweep.family not in ("exponential", "indicator"):
                problems.append(f"sweep.family: cannot sweep '{self.sweep.family}'")
            if len(thetas) < 3:
                problems.append("sweep.thetas: need at least three values")
            elif any(b <= a for a, b in zip(thetas, thetas[1:])):
                problems.append("sweep.thetas: must be strictly ascending")
        if "monte_carlo" in self.outputs and self.mc_paths < 1:
            problems.append(f"mc_paths: must be at least 1, got {self.mc_paths}")
        if "free_policy" in self.outputs:
            if self.free_policy is None:
                problems.append("free_policy: required by the free_policy output")
            elif self.free_policy.stride < 1:
                problems.append("free_policy.stride: must be at least 1")
        return problems

    def validate(self) -> "ScenarioSpec":
        problems = self.problems()
        if problems:
            listing = "\n".join(f"  - {p}" for p in problems)
            raise ConfigurationError(f"invalid scenario '{self.name}':\n{listing}")
        return self

    def build(self) -> Basis:
        self.validate()
        horizon = self.plan.horizon
        if isinstance(self.mortality, str):
            mortality = MORTALITY_PRESETS[self.mortality]()
        else:
            mortality = MortalityCurve(**self.mortality)
        return Basis(
            plan=self.plan.build(),
            technical_rate=self.technical_rate.build(horizon),
            market_rate=self.market_rate.build(horizon),
            mortality=mortality,
        )

    def with_overrides(self, **changes) -> "ScenarioSpec":
        """Copy with the given fields replaced; ``None`` values are ignored."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "description": self.description,
            "plan": vars(self.plan).copy(),
            "technical_rate": _rate_to_dict(self.technical_rate),
            "market_rate": _rate_to_dict(self.market_rate),
            "mortality": self.mortality,
            "models": {key: model.to_dict() for key, model in self.models.items()},
            "outputs": list(self.outputs),
            "step": self.step,
            "sweep": {**vars(self.sweep), "thetas": list(self.sweep.thetas)},
            "mc_paths": self.mc_paths,
            "seed": self.seed,
        }
        if self.free_policy is not None:
            fp = self.free_policy
            data["free_policy"] = {
                "surrender": fp.surrender.to_dict(),
                "conversion": fp.conversion.to_dict(),
                "free_surrender": fp.free_surrender.to_dict(),
                "stride": fp.stride,
            }
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        """Build from parsed JSON; every malformed field is reported at once."""
        problems = []
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            problems.append(f"unknown fields: {', '.join(unknown)}")
        if "name" not in data:
            problems.append("name: missing")

        def section(key, build):
            if key not in data:
                return None
            try:
                return build(data[key])
            except (TypeError, ValueError, KeyError, ThieleError) as e:
                problems.append(f"{key}: {e}")
                return None

        kwargs = {
            "plan": section("plan", lambda d: PlanSpec(**d)),
            "technical_rate": section("technical_rate", _rate_from_dict),
            "market_rate": section("market_rate", _rate_from_dict),
            "models": section("models", lambda d: {k: intensity_from_dict(v) for k, v in d.items()}),
            "outputs": section("outputs", tuple),
            "sweep": section("sweep", lambda d: SweepSpec(**d)),
            "free_policy": section("free_policy", _free_policy_from_dict),
        }
        for key in ("name", "description", "mortality", "step", "mc_paths", "seed"):
            if key in data:
                kwargs[key] = data[key]
        if problems:
            listing = "\n".join(f"  - {p}" for p in problems)
            raise ConfigurationError(f"invalid scenario file:\n{listing}")
        return cls(**{k: v for k, v in kwargs.items() if v is not None})


def _on_grid(t: float, step: float) -> bool:
    ratio = t / step
    return abs(ratio - round(ratio)) <= GRID_TOLERANCE * max(1.0, abs(ratio))


def _rate_problems(label: str, spec: RateSpec, horizon: float, step: float | None) -> list[str]:
    problems = []
    points, rates = spec.breakpoints, spec.rates
    if len(points) != len(rates):
        problems.append(f"{label}: {len(points)} breakpoints but {len(rates)} rates")
    if not points or points[0] != 0.0:
        problems.append(f"{label}: first breakpoint must be 0")
    if any(b <= a for a, b in zip(points, points[1:])):
        problems.append(f"{label}: breakpoints must be strictly ascending")
    if points and horizon > 0 and points[-1] >= horizon:
        problems.append(f"{label}: breakpoint {points[-1]} is not before the horizon {horizon}")
    if not all(math.isfinite(r) for r in rates):
        problems.append(f"{label}: rates must be finite")
    if step is not None:
        for b in points:
            if not _on_grid(b, step):
                problems.append(f"{label}: breakpoint {b} is not a multiple of step {step}")
    return problems


def _rate_to_dict(spec: RateSpec) -> dict:
    return {"breakpoints": list(spec.breakpoints), "rates": list(spec.rates)}


def _rate_from_dict(data: dict) -> RateSpec:
    return RateSpec(tuple(float(b) for b in data["breakpoints"]), tuple(float(r) for r in data["rates"]))


def _free_policy_from_dict(data: dict) -> FreePolicySpec:
    return FreePolicySpec(
        surrender=intensity_from_dict(data["surrender"]),
        conversion=intensity_from_dict(data["conversion"]),
        free_surrender=intensity_from_dict(data["free_surrender"]),
        stride=int(data.get("stride", DEFAULT_SURFACE_STRIDE)),
    )


def load_spec(path: str | Path) -> ScenarioSpec:
    """Read a JSON scenario file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a JSON object")
    return ScenarioSpec.from_dict(data).validate()


def dump_spec(spec: ScenarioSpec, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    return path


# Surrender models from the numerical study; keys are the CSV column suffixes
BUILTIN_MODELS: dict[str, tuple[IntensityModel, str]] = {
    "a": (ExponentialIntensity(0.05, 0.000003), "0.05 exp(0.000003 (G - V)), smooth in the gain"),
    "b": (IndicatorIntensity(0.05), "0.05 while surrender gains (G > V), else 0"),
    "c": (ConstantIntensity(0.05), "0.05 regardless of the gain (classical)"),
    "d": (ZeroIntensity(), "0, no surrender"),
    "e": (IndicatorIntensity(5.0), "5 while surrender gains (G > V), else 0"),
}


def _example(name: str, description: str, market_rate: RateSpec) -> ScenarioSpec:
    return ScenarioSpec(
        name=name,
        description=description,
        market_rate=market_rate,
        models={key: model for key, (model, _) in BUILTIN_MODELS.items()},
    )


BUILTIN_SCENARIOS: dict[str, ScenarioSpec] = {
    spec.name: spec
    for spec in (
        _example(
            "example1",
            "market rate 0.12 above technical 0.05: worst case is the surrender value",
            RateSpec((0.0,), (0.12,)),
        ),
        _example(
            "example2",
            "market rate 0.02 below technical 0.05: worst case is never surrendering",
            RateSpec((0.0,), (0.02,)),
        ),
        _example(
            "example3",
            "market rate 0.10, switching to 0.04 at t=20: worst case is max(G, V_d)",
            RateSpec((0.0, 20.0), (0.10, 0.04)),
        ),
        _example(
            "example4",
            "market rate 0.01, switching to 0.065 at t=20: worst case plans to surrender at t=20",
            RateSpec((0.0, 20.0), (0.01, 0.065)),
        ),
    )
}


@dataclass(frozen=True)
class Builtin:
    name: str
    kind: str  # "example" or "model"
    description: str
    family: str | None = None


def list_builtins(extra: list[ScenarioSpec] | None = None) -> list[Builtin]:
    """Examples (plus any ``extra`` scenarios) followed by the five models."""
    scenarios = list(BUILTIN_SCENARIOS.values()) + list(extra or [])
    entries = [Builtin(spec.name, "example", spec.description) for spec in scenarios]
    entries += [
        Builtin(f"model_{key}", "model", description, model.name)
        for key, (model, description) in BUILTIN_MODELS.items()
    ]
    return entries


def get_builtin(name: str, extra: list[ScenarioSpec] | None = None) -> ScenarioSpec:
    scenarios = {**BUILTIN_SCENARIOS, **{spec.name: spec for spec in extra or []}}
    if name not in scenarios:
        available = ", ".join(scenarios)
        raise ConfigurationError(f"Unknown builtin scenario '{name}'. Available: {available}")
    return scenarios[name]
