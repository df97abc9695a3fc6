"""Geometry of weak values for N-level quantum systems."""

__version__ = "0.1.0"
