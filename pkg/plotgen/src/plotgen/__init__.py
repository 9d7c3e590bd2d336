"""Convergence-curve figures from minimax benchmark trajectory CSVs."""

from .render import PlotInputError, PlotSpec, Series, load_series, render

__all__ = ["PlotInputError", "PlotSpec", "Series", "load_series", "render"]

__version__ = "0.1.0"
