"""Command line front end.

    plotkit plot --csv fig1.csv --figure fig1 --out fig1.svg

Exit codes: 0 on success, 2 for any input problem (missing file, schema
mismatch, unknown figure id, bad output suffix).
"""
import argparse
import sys

from .render import PlotError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render simulator CSV tables as multi-panel figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="render one figure from a CSV table")
    plot.add_argument("--csv", required=True, help="simulator CSV path")
    plot.add_argument("--figure", required=True, help="figure id, fig1 .. fig25")
    plot.add_argument("--out", required=True, help="output image (.svg or .png)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        out = render(args.csv, args.figure, args.out)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def entry() -> None:
    sys.exit(main())
