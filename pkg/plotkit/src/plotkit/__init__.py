"""Figure renderer for the simulator's CSV tables."""
from .render import PlotError, build_figure, read_table, render

__all__ = ["PlotError", "build_figure", "read_table", "render"]
