"""Named simulation scenarios and their CSV emission.

Every figure preset pairs an atom register and two identical cavity
fields with a model variant and a one-parameter sweep; running one yields
a flat table with one row per (sweep value, time sample). Sweeps over the
field or atom parameters reuse grids of the same Hamiltonian; sweeps over
model parameters rebuild it per value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TextIO, Union

import numpy as np

from .entangle import measure_trajectory
from .errors import ConfigurationError
from .evolve import DEFAULT_GRID, TimeGrid, trajectory
from .hamiltonian import ModelParams, build
from .qops import CompositeSpace
from .states import AtomSpec, FieldSpec, assemble_initial, sweep_field

__all__ = [
    "CSV_HEADER",
    "DEFAULT_CUTOFF",
    "Scenario",
    "ResultTable",
    "preset",
    "preset_names",
    "run",
    "emit_csv",
]

DEFAULT_CUTOFF = 16

CSV_HEADER = "gt,sweep_name,sweep_value,C_AB,N_Aa,N_Ab,N_ab,trace_err,leakage"

_MODEL_SWEEPS = ("jz", "delta", "kerr_k")
_FIELD_SWEEPS = ("nbar_s", "nbar_th")
_SWEEP_NAMES = _FIELD_SWEEPS + ("lambda",) + _MODEL_SWEEPS + ("none",)


@dataclass(frozen=True)
class Scenario:
    """A complete, runnable parameter set."""

    label: str
    atom: AtomSpec
    field_a: FieldSpec
    field_b: FieldSpec
    model: ModelParams
    grid: TimeGrid = DEFAULT_GRID
    cutoff: int = DEFAULT_CUTOFF
    sweep_name: str = "none"
    sweep_values: tuple[float, ...] = (0.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        if self.sweep_name not in _SWEEP_NAMES:
            raise ConfigurationError(f"unknown sweep parameter {self.sweep_name!r}")
        if not self.sweep_values:
            raise ConfigurationError("sweep_values must not be empty")
        if int(self.cutoff) < 2:
            raise ConfigurationError(f"cutoff must be >= 2, got {self.cutoff}")
        # fail fast if the sweep names a parameter the scenario does not have
        name = self.sweep_name
        if name == "nbar_s" and not (self.field_a.kind == self.field_b.kind == "scs"):
            raise ConfigurationError("nbar_s sweep requires scs fields")
        if name == "nbar_th" and not (self.field_a.kind == self.field_b.kind == "gl"):
            raise ConfigurationError("nbar_th sweep requires gl fields")
        if name == "lambda" and self.atom.kind != "werner":
            raise ConfigurationError("lambda sweep requires werner atoms")
        if name == "jz" and self.model.variant != "ising":
            raise ConfigurationError("jz sweep requires the ising variant")
        if name == "delta" and self.model.variant != "detuned":
            raise ConfigurationError("delta sweep requires the detuned variant")
        if name == "kerr_k" and self.model.variant != "kerr":
            raise ConfigurationError("kerr_k sweep requires the kerr variant")

    def at(self, value: float) -> "Scenario":
        """The scenario with the swept parameter pinned to one value."""
        name = self.sweep_name
        if name == "none":
            return self
        if name in _FIELD_SWEEPS:
            return replace(
                self,
                field_a=sweep_field(self.field_a, name, value),
                field_b=sweep_field(self.field_b, name, value),
            )
        if name == "lambda":
            if self.atom.kind != "werner":
                raise ConfigurationError("lambda sweep requires werner atoms")
            return replace(self, atom=replace(self.atom, lam=value))
        if name == "jz" and self.model.variant != "ising":
            raise ConfigurationError("jz sweep requires the ising variant")
        if name == "delta" and self.model.variant != "detuned":
            raise ConfigurationError("delta sweep requires the detuned variant")
        if name == "kerr_k" and self.model.variant != "kerr":
            raise ConfigurationError("kerr_k sweep requires the kerr variant")
        return replace(self, model=replace(self.model, **{name: value}))


@dataclass(frozen=True)
class ResultTable:
    """Flat measurement table; len(gt) = len(sweep_values) * grid points."""

    label: str
    sweep_name: str
    gt: np.ndarray
    sweep_value: np.ndarray
    c_ab: np.ndarray
    n_aa: np.ndarray
    n_ab_remote: np.ndarray
    n_ff: np.ndarray
    trace_err: np.ndarray
    leakage: np.ndarray


_BELL = AtomSpec("bell", theta=math.pi / 4)
_W75 = AtomSpec("werner", lam=0.75)
_W25 = AtomSpec("werner", lam=0.25)


def _scs(nbar_s: float = 0.1) -> FieldSpec:
    return FieldSpec("scs", nbar_c=0.5, nbar_s=nbar_s)


def _gl(nbar_th: float = 0.1) -> FieldSpec:
    return FieldSpec("gl", nbar_c=0.5, nbar_th=nbar_th)


_NBAR_SWEEP = (0.0, 0.1, 0.3, 0.5)
_JZ_SWEEP = (0.1, 0.3, 0.7, 1.0)
_DELTA_SWEEP = (2.0, 5.0, 10.0)
_KERR_SWEEP = (0.0, 0.2, 0.5, 1.0)
_UNIT_GRID_21 = tuple(np.linspace(0.0, 1.0, 21))

_BARE = ModelParams()
_ISING = ModelParams(variant="ising", jz=_JZ_SWEEP[0])
_DETUNED = ModelParams(variant="detuned", delta=_DELTA_SWEEP[0])
_KERR = ModelParams(variant="kerr", kerr_k=_KERR_SWEEP[0])


def _presets() -> dict[str, Scenario]:
    table: dict[str, Scenario] = {}

    def add(num: int, atom: AtomSpec, field: FieldSpec, model: ModelParams,
            sweep: str, values: tuple[float, ...]) -> None:
        name = f"fig{num}"
        table[name] = Scenario(
            label=name, atom=atom, field_a=field, field_b=field,
            model=model, sweep_name=sweep, sweep_values=values,
        )

    # sudden-death panels and their single-plot re-layouts share scenarios
    add(1, _BELL, _scs(0.0), _BARE, "nbar_s", _NBAR_SWEEP)
    add(2, _BELL, _scs(0.0), _BARE, "nbar_s", _NBAR_SWEEP)
    add(3, _W75, _scs(0.0), _BARE, "nbar_s", _NBAR_SWEEP)
    add(4, _W75, _scs(0.0), _BARE, "nbar_s", _NBAR_SWEEP)
    add(5, _W75, _scs(), _BARE, "lambda", _UNIT_GRID_21)
    add(6, _BELL, _gl(0.0), _BARE, "nbar_th", _NBAR_SWEEP)
    add(7, _BELL, _gl(0.0), _BARE, "nbar_th", _NBAR_SWEEP)
    add(8, _W75, _gl(0.0), _BARE, "nbar_th", _NBAR_SWEEP)
    add(9, _W75, _gl(0.0), _BARE, "nbar_th", _NBAR_SWEEP)
    add(10, _W75, _gl(), _BARE, "lambda", _UNIT_GRID_21)
    add(11, _BELL, _scs(), _ISING, "jz", _JZ_SWEEP)
    add(12, _W75, _scs(), _ISING, "jz", _JZ_SWEEP)
    add(13, _W25, _scs(), _BARE, "lambda", (0.25,))
    add(14, _W25, _scs(), _ISING, "jz", _UNIT_GRID_21)
    add(15, _BELL, _gl(), _ISING, "jz", _JZ_SWEEP)
    add(16, _W75, _gl(), _ISING, "jz", _JZ_SWEEP)
    add(17, _W25, _gl(), _ISING, "jz", _UNIT_GRID_21)
    add(18, _BELL, _scs(), _DETUNED, "delta", _DELTA_SWEEP)
    add(19, _W75, _scs(), _DETUNED, "delta", _DELTA_SWEEP)
    add(20, _BELL, _gl(), _DETUNED, "delta", _DELTA_SWEEP)
    add(21, _W75, _gl(), _DETUNED, "delta", _DELTA_SWEEP)
    add(22, _BELL, _scs(), _KERR, "kerr_k", _KERR_SWEEP)
    add(23, _W75, _scs(), _KERR, "kerr_k", _KERR_SWEEP)
    add(24, _BELL, _gl(), _KERR, "kerr_k", _KERR_SWEEP)
    add(25, _W75, _gl(), _KERR, "kerr_k", _KERR_SWEEP)
    return table


def preset_names() -> list[str]:
    return [f"fig{k}" for k in range(1, 26)]


def preset(name: str) -> Scenario:
    table = _presets()
    if name not in table:
        raise ConfigurationError(
            f"unknown preset {name!r}; valid names are fig1 .. fig25"
        )
    return table[name]


def run(scenario: Scenario) -> ResultTable:
    """Run every sweep value and stack the measured series."""
    space = CompositeSpace(scenario.cutoff)
    order = np.argsort(np.asarray(scenario.sweep_values), kind="stable")
    values = [scenario.sweep_values[i] for i in order]

    blocks = []
    h_cache: dict[ModelParams, object] = {}
    for value in values:
        pinned = scenario.at(value)
        if pinned.model not in h_cache:
            h_cache[pinned.model] = build(pinned.model, space)
        h = h_cache[pinned.model]
        state = assemble_initial(pinned.atom, pinned.field_a, pinned.field_b, space)
        traj = trajectory(state, h, scenario.grid)
        series = measure_trajectory(traj, g=pinned.model.g)
        blocks.append((value, series))

    points = scenario.grid.points
    total = len(values) * points
    out = {key: np.empty(total) for key in
           ("gt", "sweep_value", "c_ab", "n_aa", "n_ab_remote", "n_ff",
            "trace_err", "leakage")}
    for i, (value, series) in enumerate(blocks):
        sl = slice(i * points, (i + 1) * points)
        out["gt"][sl] = series.gt
        out["sweep_value"][sl] = value
        out["c_ab"][sl] = series.c_atoms
        out["n_aa"][sl] = series.n_atom_field
        out["n_ab_remote"][sl] = series.n_atom_remote
        out["n_ff"][sl] = series.n_fields
        out["trace_err"][sl] = series.trace_err
        out["leakage"][sl] = series.leakage
    return ResultTable(label=scenario.label, sweep_name=scenario.sweep_name, **out)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def emit_csv(table: ResultTable, dest: Union[str, TextIO]) -> None:
    """Write the table, sorted by (sweep value, gt), at 12 significant digits."""
    order = np.lexsort((table.gt, table.sweep_value))
    lines = [CSV_HEADER]
    for i in order:
        lines.append(",".join([
            _fmt(table.gt[i]),
            table.sweep_name,
            _fmt(table.sweep_value[i]),
            _fmt(table.c_ab[i]),
            _fmt(table.n_aa[i]),
            _fmt(table.n_ab_remote[i]),
            _fmt(table.n_ff[i]),
            _fmt(table.trace_err[i]),
            _fmt(table.leakage[i]),
        ]))
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, bytes)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)
