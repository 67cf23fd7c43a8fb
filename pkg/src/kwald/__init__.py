"""Finite models of exact and Waldhausen categories, K0, and discrete cohomology."""

__version__ = "0.1.0"
