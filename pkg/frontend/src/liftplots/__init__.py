"""Figure rendering for lift CSV files (columns tau,l,z,a)."""

from .render import PlotJob, PlotError, read_lift_csv, render

__all__ = ["PlotJob", "PlotError", "read_lift_csv", "render"]
