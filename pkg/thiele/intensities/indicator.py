"""Indicator family: theta while surrender is strictly profitable."""

from dataclasses import dataclass

import numpy as np

from thiele.errors import DomainError
from thiele.intensities.base import IntensityModel


@dataclass(frozen=True)
class IndicatorIntensity(IntensityModel):
    theta: float

    name = "indicator"

    def __post_init__(self):
        if self.theta < 0:
            raise DomainError(f"theta must be non-negative, got {self.theta}")

    def evaluate(self, t: float, gain: float) -> float:
        # zero at gain == 0; h * gain is continuous there either way
        return self.theta if gain > 0 else 0.0

    def evaluate_many(self, times: np.ndarray, gains: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(gains) > 0, self.theta, 0.0)
