"""Render simulator CSV tables into the standard multi-panel figures.

Input is the flat table the simulator emits: one row per (sweep value,
time point) with the four entanglement columns. Output is a 2x2 image
whose layout depends on the figure id:

* contour figures (5, 10, 14, 17): one filled contour per measure over
  the (gt, sweep value) grid;
* per-value figures (2, 4, 7, 9): one panel per sweep value, all four
  measure curves in each;
* everything else: one panel per measure, one curve per sweep value.

Rendering is read-only over its inputs and deterministic: identical CSV
and figure id produce byte-identical output (embedded timestamps are
disabled, the SVG id salt is pinned).
"""
import csv
import re
from dataclasses import dataclass

import matplotlib
import numpy as np
from matplotlib.figure import Figure

__all__ = ["PlotError", "Table", "build_figure", "read_table", "render"]

MEASURES = ("C_AB", "N_Aa", "N_Ab", "N_ab")
REQUIRED_COLUMNS = ("gt", "sweep_name", "sweep_value") + MEASURES + (
    "trace_err", "leakage")

CONTOUR_FIGURES = frozenset({5, 10, 14, 17})
PANEL_PER_VALUE_FIGURES = frozenset({2, 4, 7, 9})

# fixed style table; colors cycle when a sweep has more curves
CURVE_COLORS = ("#1f5fa8", "#c23b4b", "#2f7d3b", "#8a5aa8",
                "#b07b22", "#3b8f8f", "#72652f", "#864646")
CONTOUR_LEVELS = 16
CONTOUR_CMAP = "viridis"
SVG_HASHSALT = "plotkit"


class PlotError(Exception):
    """Raised for malformed input tables, ids, or output paths."""


@dataclass(frozen=True)
class Table:
    """Parsed CSV: flat arrays plus the sweep column's name."""

    sweep_name: str
    gt: np.ndarray
    sweep_value: np.ndarray
    data: dict  # measure name -> array

    def groups(self):
        """(value, row mask) per distinct sweep value, ascending."""
        return [(float(v), self.sweep_value == v)
                for v in np.unique(self.sweep_value)]


def read_table(csv_path: str) -> Table:
    """Parse and validate a simulator CSV. Fails before anything is drawn."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise PlotError(f"{csv_path}: file is empty")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise PlotError(
                f"{csv_path}: missing columns: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise PlotError(f"{csv_path}: no data rows")

    def column(name):
        try:
            return np.array([float(row[name]) for row in rows])
        except (TypeError, ValueError):
            raise PlotError(f"{csv_path}: non-numeric value in column {name}")

    names = {row["sweep_name"] for row in rows}
    if len(names) != 1:
        raise PlotError(f"{csv_path}: mixed sweep names {sorted(names)}")
    return Table(
        sweep_name=names.pop(),
        gt=column("gt"),
        sweep_value=column("sweep_value"),
        data={name: column(name) for name in MEASURES},
    )


def _figure_kind(figure_id: str) -> str:
    m = re.fullmatch(r"fig([0-9]+)", figure_id)
    if not m or not 1 <= int(m.group(1)) <= 25:
        raise PlotError(
            f"unknown figure id {figure_id!r}; expected fig1 .. fig25")
    number = int(m.group(1))
    if number in CONTOUR_FIGURES:
        return "contour"
    if number in PANEL_PER_VALUE_FIGURES:
        return "panel_per_value"
    return "panel_per_measure"


def _curve_label(table: Table, value: float):
    # a sweep named "none" is a single unswept run; suppress its legend
    if table.sweep_name == "none":
        return None
    return f"{table.sweep_name}={value:g}"


def _draw_panel_per_measure(fig: Figure, table: Table) -> None:
    groups = table.groups()
    for ax, name in zip(fig.subplots(2, 2).flat, MEASURES):
        for i, (value, mask) in enumerate(groups):
            ax.plot(table.gt[mask], table.data[name][mask],
                    color=CURVE_COLORS[i % len(CURVE_COLORS)],
                    linewidth=1.1, label=_curve_label(table, value))
        ax.set_title(name)
        ax.set_xlabel("gt")
        ax.set_ylabel(name)
        if table.sweep_name != "none":
            ax.legend(fontsize=8)


def _draw_panel_per_value(fig: Figure, table: Table) -> None:
    groups = table.groups()
    axes = fig.subplots(2, 2).flat
    for ax, (value, mask) in zip(axes, groups[:4]):
        for name, color in zip(MEASURES, CURVE_COLORS):
            ax.plot(table.gt[mask], table.data[name][mask],
                    color=color, linewidth=1.1, label=name)
        title = _curve_label(table, value)
        ax.set_title(title if title else "all measures")
        ax.set_xlabel("gt")
        ax.set_ylabel("entanglement")
        ax.legend(fontsize=8)
    for ax in list(axes)[len(groups):]:
        ax.set_visible(False)


def _draw_contours(fig: Figure, table: Table) -> None:
    groups = table.groups()
    if len(groups) < 2:
        raise PlotError("contour layout needs at least two sweep values")
    lengths = {int(np.count_nonzero(mask)) for _, mask in groups}
    if len(lengths) != 1:
        raise PlotError("sweep values cover differing time grids")
    times = table.gt[groups[0][1]]
    values = np.array([value for value, _ in groups])
    for ax, name in zip(fig.subplots(2, 2).flat, MEASURES):
        z = np.vstack([table.data[name][mask] for _, mask in groups])
        filled = ax.contourf(times, values, z,
                             levels=CONTOUR_LEVELS, cmap=CONTOUR_CMAP)
        fig.colorbar(filled, ax=ax)
        ax.set_title(name)
        ax.set_xlabel("gt")
        ax.set_ylabel(table.sweep_name)


def build_figure(table: Table, figure_id: str) -> Figure:
    """Assemble the 2x2 figure for one id without touching the filesystem."""
    kind = _figure_kind(figure_id)
    fig = Figure(figsize=(10.0, 7.5), dpi=100)
    if kind == "contour":
        _draw_contours(fig, table)
    elif kind == "panel_per_value":
        _draw_panel_per_value(fig, table)
    else:
        _draw_panel_per_measure(fig, table)
    fig.tight_layout()
    return fig


def render(csv_path: str, figure_id: str, out_path: str) -> str:
    """Render one figure id from a simulator CSV to an svg or png file.

    All validation happens before the output file is created, so a bad
    table or id never leaves a partial image behind.
    """
    out = str(out_path)
    if not out.endswith((".svg", ".png")):
        raise PlotError(f"output path must end in .svg or .png, got {out!r}")
    table = read_table(csv_path)
    fig = build_figure(table, figure_id)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
        if out.endswith(".svg"):
            fig.savefig(out, metadata={"Date": None})
        else:
            fig.savefig(out)
    return out
