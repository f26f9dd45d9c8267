"""Free-policy hook for Thiele.

Usage:
    thiele run --builtin example2_free_policy --hook hooks/free_policy.py

Adds a scenario where the active policy may also convert to a free policy,
and a "linear" intensity family usable from JSON scenario files.
"""

from dataclasses import dataclass

from thiele.errors import DomainError
from thiele.intensities import ConstantIntensity, IntensityModel
from thiele.scenarios import BUILTIN_SCENARIOS, FreePolicySpec


@dataclass(frozen=True)
class LinearIntensity(IntensityModel):
    """``level + slope * max(gain, 0)``, capped at ``cap``."""

    level: float
    slope: float
    cap: float = 10.0

    name = "linear"

    def __post_init__(self):
        if self.level < 0 or self.slope < 0 or self.cap < self.level:
            raise DomainError("linear intensity needs 0 <= level <= cap and slope >= 0")

    @property
    def ceiling(self) -> float:
        return self.cap

    def evaluate(self, t: float, gain: float) -> float:
        return min(self.level + self.slope * max(gain, 0.0), self.cap)


SCENARIOS = [
    BUILTIN_SCENARIOS["example2"].with_overrides(
        name="example2_free_policy",
        description="example 2 with conversion to a free policy at intensity 0.02",
        outputs=("grids", "free_policy"),
        free_policy=FreePolicySpec(
            surrender=LinearIntensity(0.02, 1e-7),
            conversion=ConstantIntensity(0.02),
            free_surrender=ConstantIntensity(0.05),
        ),
    ),
]

INTENSITIES = {"linear": LinearIntensity}
