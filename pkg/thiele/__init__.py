"""Thiele - reserve-dependent surrender and worst-case reserves."""

__version__ = "0.1.0"
