"""Dimension estimates for dynamical systems under compositional metrics."""
__version__ = "0.1.0"
