"""Exact multiplicity oracles and multiplicity bounds for polynomial vector fields."""

__version__ = "0.1.0"
