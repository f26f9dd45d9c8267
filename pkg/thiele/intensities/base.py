"""Base class for surrender intensity families h(t, gain)."""

import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class IntensityModel(ABC):
    """A non-negative intensity that is non-decreasing in the gain G - V."""

    name = "intensity"  # Family identifier, e.g. "exponential", "indicator"

    @abstractmethod
    def evaluate(self, t: float, gain: float) -> float:
        """Intensity (per year) at time t when surrendering gains ``gain``."""

    def __call__(self, t: float, gain: float) -> float:
        return self.evaluate(t, gain)

    def evaluate_many(self, times: np.ndarray, gains: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(float(t), float(g)) for t, g in zip(times, gains)])

    @property
    def gain_independent(self) -> bool:
        """True when the intensity ignores the gain (a plain time-dependent intensity)."""
        return False

    @property
    def ceiling(self) -> float:
        """Largest value the intensity can reach."""
        return math.inf

    def upper_envelope(self, gain: float, t: float = 0.0) -> float:
        """sup over y <= gain of h(t, y); equals h itself for a non-decreasing family."""
        return self.evaluate(t, gain)

    def lower_envelope(self, gain: float, t: float = 0.0) -> float:
        """inf over y >= gain of h(t, y)."""
        return self.evaluate(t, gain)

    def to_dict(self) -> dict:
        return {"family": self.name, **asdict(self)}
