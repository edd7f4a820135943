"""Exact and Monte Carlo tools for the (alpha, theta) ordered CRP up-down chain."""

__version__ = "0.1.0"
