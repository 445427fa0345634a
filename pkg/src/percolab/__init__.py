"""Exploration algorithms, spectral tools and dynamics for critical percolation."""

__version__ = "0.1.0"
