"""Coordinate verification kernel for nonlinear gauge theory on Lie algebroids."""

__version__ = "0.1.0"
