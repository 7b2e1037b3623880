"""Scaled-Laguerre spectral and DG discretizations for waves on [0, inf)."""

__version__ = "0.1.0"
