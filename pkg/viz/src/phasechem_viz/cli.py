"""Standalone figure generation for solver runs.

    phasechem-viz energy        --input RUN_DIR_OR_CSV --out FIG.png
    phasechem-viz conservation  --input ... --out ...
    phasechem-viz separation    --input ... --out ...
    phasechem-viz sigma-sup     --input ... --out ...
    phasechem-viz snapshot      --input FIELDS.vtk --out FIG.png
    phasechem-viz all           --input RUN_DIR --out FIG_DIR

--input may be a run directory (containing timeseries.csv) or a CSV path.
Exit codes: 0 success, 2 unreadable or schema-invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import PLOTTERS, plot_snapshot
from .series import SchemaError, SeriesFrame
from .vtkread import VtkFormatError, read_vtk


def _resolve_csv(path: Path) -> Path:
    if path.is_dir():
        return path / "timeseries.csv"
    return path


def _build_parser():
    parser = argparse.ArgumentParser(prog="phasechem-viz",
                                     description="diagnostic figures for solver runs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*PLOTTERS, "snapshot", "all"):
        p = sub.add_parser(name)
        p.add_argument("--input", required=True,
                       help="run directory, timeseries CSV, or VTK snapshot")
        p.add_argument("--out", required=True,
                       help="output figure file (or directory for 'all')")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    inp = Path(args.input)
    out = Path(args.out)
    try:
        if args.command == "snapshot":
            path = plot_snapshot(read_vtk(inp), out)
            print(f"wrote {path}")
        elif args.command == "all":
            series = SeriesFrame.load(_resolve_csv(inp))
            out.mkdir(parents=True, exist_ok=True)
            for name, plotter in PLOTTERS.items():
                path = plotter(series, out / f"{name.replace('-', '_')}.png")
                print(f"wrote {path}")
            if inp.is_dir():
                for vtk in sorted(inp.glob("fields_*.vtk")):
                    path = plot_snapshot(read_vtk(vtk), out / (vtk.stem + ".png"))
                    print(f"wrote {path}")
        else:
            series = SeriesFrame.load(_resolve_csv(inp))
            path = PLOTTERS[args.command](series, out)
            print(f"wrote {path}")
    except (SchemaError, VtkFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
