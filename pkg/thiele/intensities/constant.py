"""Gain-independent families."""

from dataclasses import dataclass

import numpy as np

from thiele.errors import DomainError
from thiele.intensities.base import IntensityModel


@dataclass(frozen=True)
class ConstantIntensity(IntensityModel):
    """Classical surrender at a fixed intensity."""

    level: float

    name = "constant"

    def __post_init__(self):
        if self.level < 0:
            raise DomainError(f"intensity level must be non-negative, got {self.level}")

    def evaluate(self, t: float, gain: float) -> float:
        return self.level

    def evaluate_many(self, times: np.ndarray, gains: np.ndarray) -> np.ndarray:
        return np.full(np.shape(gains), self.level, dtype=float)

    @property
    def gain_independent(self) -> bool:
        return True


@dataclass(frozen=True)
class ZeroIntensity(IntensityModel):
    """No surrender."""

    name = "zero"

    def evaluate(self, t: float, gain: float) -> float:
        return 0.0

    def evaluate_many(self, times: np.ndarray, gains: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(gains), dtype=float)

    @property
    def gain_independent(self) -> bool:
        return True
