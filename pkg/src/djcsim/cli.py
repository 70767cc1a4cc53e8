"""Command-line front end.

    djcsim simulate --preset fig1 [--out fig1.csv] [--cutoff N] [--tmax T] [--points P]
    djcsim simulate --config run.cfg [...]
    djcsim list-presets

Config files are flat `key = value` text mirroring the scenario fields;
see parse_config for the key set. Exit codes: 0 on success, 2 for
configuration errors, 3 for numerical-contract failures.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .errors import ConfigurationError, SimulationError
from .evolve import TimeGrid
from .hamiltonian import ModelParams
from .scenario import (
    DEFAULT_CUTOFF,
    Scenario,
    emit_csv,
    preset,
    preset_names,
    run,
)
from .states import AtomSpec, FieldSpec

_CONFIG_KEYS = {
    "label", "atom", "theta", "lambda", "field", "nbar_c", "nbar_s", "nbar_th",
    "variant", "g", "jz", "delta", "kerr_k", "omega",
    "cutoff", "t_max", "points", "sweep", "sweep_values",
}

_PRESET_NOTES = {
    "fig1": "bell + squeezed-coherent, nbar_s sweep",
    "fig2": "fig1 data, single-plot panels",
    "fig3": "werner 0.75 + squeezed-coherent, nbar_s sweep",
    "fig4": "fig3 data, single-plot panels",
    "fig5": "werner weight contour, squeezed-coherent",
    "fig6": "bell + displaced-thermal, nbar_th sweep",
    "fig7": "fig6 data, single-plot panels",
    "fig8": "werner 0.75 + displaced-thermal, nbar_th sweep",
    "fig9": "fig8 data, single-plot panels",
    "fig10": "werner weight contour, displaced-thermal",
    "fig11": "bell + squeezed-coherent, ising jz sweep",
    "fig12": "werner 0.75 + squeezed-coherent, ising jz sweep",
    "fig13": "werner 0.25 + squeezed-coherent, no extra coupling",
    "fig14": "ising jz contour, squeezed-coherent, werner 0.25",
    "fig15": "bell + displaced-thermal, ising jz sweep",
    "fig16": "werner 0.75 + displaced-thermal, ising jz sweep",
    "fig17": "ising jz contour, displaced-thermal, werner 0.25",
    "fig18": "bell + squeezed-coherent, detuning sweep",
    "fig19": "werner 0.75 + squeezed-coherent, detuning sweep",
    "fig20": "bell + displaced-thermal, detuning sweep",
    "fig21": "werner 0.75 + displaced-thermal, detuning sweep",
    "fig22": "bell + squeezed-coherent, kerr sweep",
    "fig23": "werner 0.75 + squeezed-coherent, kerr sweep",
    "fig24": "bell + displaced-thermal, kerr sweep",
    "fig25": "werner 0.75 + displaced-thermal, kerr sweep",
}


def parse_config(text: str) -> Scenario:
    """Build a Scenario from flat `key = value` lines (# starts a comment)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigurationError(f"config line {lineno}: duplicate key {key!r}")
        raw[key] = value

    def number(key: str, default: Optional[float] = None) -> Optional[float]:
        if key not in raw:
            return default
        try:
            return float(raw[key])
        except ValueError as exc:
            raise ConfigurationError(f"config key {key!r} is not a number: {raw[key]!r}") from exc

    atom_kind = raw.get("atom", "bell")
    if atom_kind == "bell":
        atom = AtomSpec("bell", theta=number("theta", math.pi / 4))
    elif atom_kind == "werner":
        atom = AtomSpec("werner", lam=number("lambda", 1.0))
    else:
        raise ConfigurationError(f"unknown atom kind {atom_kind!r}")

    field_kind = raw.get("field", "scs")
    if field_kind == "scs":
        field = FieldSpec("scs", nbar_c=number("nbar_c", 0.0), nbar_s=number("nbar_s", 0.0))
    elif field_kind == "gl":
        field = FieldSpec("gl", nbar_c=number("nbar_c", 0.0), nbar_th=number("nbar_th", 0.0))
    else:
        raise ConfigurationError(f"unknown field kind {field_kind!r}")

    model = ModelParams(
        variant=raw.get("variant", "bare"),
        g=number("g", 1.0),
        jz=number("jz"),
        delta=number("delta"),
        kerr_k=number("kerr_k"),
        omega=number("omega", 1.0),
    )

    grid = TimeGrid(t_max=number("t_max", 25.0), points=int(number("points", 1001)))
    sweep_name = raw.get("sweep", "none")
    if "sweep_values" in raw:
        try:
            values = tuple(float(v) for v in raw["sweep_values"].split(",") if v.strip())
        except ValueError as exc:
            raise ConfigurationError(f"bad sweep_values: {raw['sweep_values']!r}") from exc
    else:
        values = (0.0,)
    if sweep_name != "none" and "sweep_values" not in raw:
        raise ConfigurationError("sweep requires sweep_values")

    return Scenario(
        label=raw.get("label", "custom"),
        atom=atom,
        field_a=field,
        field_b=field,
        model=model,
        grid=grid,
        cutoff=int(number("cutoff", DEFAULT_CUTOFF)),
        sweep_name=sweep_name,
        sweep_values=values,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="djcsim",
        description="entanglement dynamics of two atom-cavity pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a preset or config and write CSV")
    source = sim.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", help="figure preset name (fig1 .. fig25)")
    source.add_argument("--config", help="path to a flat key=value config file")
    sim.add_argument("--out", help="output CSV path (default: <label>.csv)")
    sim.add_argument("--cutoff", type=int, help="Fock levels per field")
    sim.add_argument("--tmax", type=float, help="time-grid end, units of 1/g")
    sim.add_argument("--points", type=int, help="time-grid samples")

    sub.add_parser("list-presets", help="list figure presets")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-presets":
            for name in preset_names():
                print(f"{name:7s} {_PRESET_NOTES[name]}")
            return 0
        if args.preset is not None:
            scenario = preset(args.preset)
        else:
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    scenario = parse_config(fh.read())
            except OSError as exc:
                raise ConfigurationError(f"cannot read config {args.config!r}: {exc}") from exc
        grid = scenario.grid
        if args.tmax is not None or args.points is not None:
            grid = TimeGrid(
                t_max=args.tmax if args.tmax is not None else grid.t_max,
                points=args.points if args.points is not None else grid.points,
            )
        scenario = replace(
            scenario,
            grid=grid,
            cutoff=args.cutoff if args.cutoff is not None else scenario.cutoff,
        )
        table = run(scenario)
        out = args.out if args.out is not None else f"{scenario.label}.csv"
        emit_csv(table, out)
        print(f"wrote {out}")
        return 0
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())
