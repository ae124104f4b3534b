"""Wedge-sampling estimates of clustering coefficients and triangle counts."""

__version__ = "0.1.0"
