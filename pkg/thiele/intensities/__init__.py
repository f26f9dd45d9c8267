"""Surrender intensity families."""

from .base import IntensityModel
from .constant import ConstantIntensity, ZeroIntensity
from .exponential import ExponentialIntensity
from .indicator import IndicatorIntensity

# Registry of available families
INTENSITIES: dict[str, type[IntensityModel]] = {
    "constant": ConstantIntensity,
    "exponential": ExponentialIntensity,
    "indicator": IndicatorIntensity,
    "zero": ZeroIntensity,
}


def create_intensity(name: str, **params) -> IntensityModel:
    """Create an intensity model by family name.

    Args:
        name: Family name ("constant", "exponential", "indicator", "zero")
        **params: Family parameters (level, psi, theta, cap)

    Returns:
        Configured intensity model

    Raises:
        ValueError: If the family name is unknown
    """
    if name not in INTENSITIES:
        available = ", ".join(INTENSITIES.keys())
        raise ValueError(f"Unknown intensity family '{name}'. Available: {available}")

    return INTENSITIES[name](**params)


def intensity_from_dict(data: dict) -> IntensityModel:
    """Inverse of ``IntensityModel.to_dict``."""
    params = dict(data)
    return create_intensity(params.pop("family"), **params)


__all__ = [
    "IntensityModel",
    "ConstantIntensity",
    "ExponentialIntensity",
    "IndicatorIntensity",
    "ZeroIntensity",
    "INTENSITIES",
    "create_intensity",
    "intensity_from_dict",
]
