"""Exponential family: psi * exp(theta * gain)."""

import math
from dataclasses import dataclass

import numpy as np

from thiele.config import DEFAULT_INTENSITY_CAP
from thiele.errors import DomainError, NumericalError
from thiele.intensities.base import IntensityModel


@dataclass(frozen=True)
class ExponentialIntensity(IntensityModel):
    """``psi`` is the overall tendency to surrender, ``theta`` (per unit of money)
    how strongly the gain moves it. Capped at ``cap`` per year."""

    psi: float
    theta: float
    cap: float = DEFAULT_INTENSITY_CAP

    name = "exponential"

    def __post_init__(self):
        if self.psi < 0 or self.theta < 0:
            raise DomainError(f"psi and theta must be non-negative, got {self.psi}, {self.theta}")
        if not self.cap > 0:
            raise DomainError("intensity cap must be positive")
        if self.psi > 0:
            object.__setattr__(self, "_log_limit", math.log(self.cap / self.psi))

    @property
    def ceiling(self) -> float:
        return self.cap

    def evaluate(self, t: float, gain: float) -> float:
        if not math.isfinite(gain):
            raise NumericalError(f"non-finite gain {gain} at t={t}", time=t, gain=gain)
        if self.psi == 0.0:
            return 0.0
        exponent = self.theta * gain
        if exponent >= self._log_limit:
            return self.cap
        return self.psi * math.exp(exponent)

    def evaluate_many(self, times: np.ndarray, gains: np.ndarray) -> np.ndarray:
        gains = np.asarray(gains, dtype=float)
        if self.psi == 0.0:
            return np.zeros_like(gains)
        exponent = np.minimum(self.theta * gains, self._log_limit)
        return np.minimum(self.psi * np.exp(exponent), self.cap)
