"""Batch figure rendering for emhd25 CSV artifacts.

This package consumes only the CSV files the simulator writes (trajectory,
scan, fits, region, and sweep tables) and never imports the simulator, so
figures are regenerable from shipped CSVs alone.
"""

from .figspec import KINDS, FigureSpec
from .figures import FigureResult, plot_norm_growth, plot_region, render

__all__ = [
    "KINDS",
    "FigureSpec",
    "FigureResult",
    "plot_norm_growth",
    "plot_region",
    "render",
]
