"""Periods, monodromy and F_p point counts for the two-parameter quintic mirror family."""

__version__ = "0.1.0"
