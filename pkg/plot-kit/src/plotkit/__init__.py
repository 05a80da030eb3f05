"""Render sweep result CSVs as the two standard trend figures.

The input is the per-trial CSV written by the simulation harness (consumed
purely as a file format — no solver code is imported). Each figure draws
one line per (scheme, error level) pair: the mean MSE over trials with a
shaded band of one standard error.
"""

from .data import EXPECTED_HEADER, SchemaError, SeriesPoint, TrialRow, aggregate, read_rows
from .render import KINDS, PlotSpec, build_figure, render

__all__ = [
    "EXPECTED_HEADER",
    "KINDS",
    "PlotSpec",
    "SchemaError",
    "SeriesPoint",
    "TrialRow",
    "aggregate",
    "build_figure",
    "read_rows",
    "render",
]

__version__ = "0.1.0"
