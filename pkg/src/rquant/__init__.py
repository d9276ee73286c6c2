"""Exact desk-scale computations for Frobenius-constant quantizations in characteristic p."""

__version__ = "0.1.0"
