"""Time-series, field-snapshot and manifest output.

The CSV schema is fixed: one header line with the column names below, then
one row per recorded step, every float printed with 17 significant digits so
runs can be compared bit for bit.  Field snapshots use legacy ASCII VTK
structured points (phi, sigma, speed, pressure at cell centers), readable by
standard viewers and by the plotting package without custom binary readers.
A JSON manifest ties every artifact to the configuration hash.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, config_hash, serialize_config
from .simulation import DiagnosticsRecord, SimState

CSV_HEADER = ",".join(DiagnosticsRecord.COLUMNS)


def format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_timeseries(records, path) -> Path:
    """Write diagnostics records as CSV with the documented column order."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for rec in records:
                fh.write(",".join(format_value(v) for v in rec.as_row()) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write time series to {path}: {exc}") from exc
    return path


def _vtk_scalar(fh, name: str, data: np.ndarray):
    fh.write(f"SCALARS {name} double 1\n")
    fh.write("LOOKUP_TABLE default\n")
    # VTK structured points iterate x fastest; our arrays are [ix, iy]
    for v in np.ravel(data, order="F"):
        fh.write(f"{v:.17g}\n")


def write_fields(state: SimState, path, pressure: np.ndarray | None = None) -> Path:
    """One legacy VTK structured-points file with phi, sigma, |v| and P."""
    g = state.grid
    path = Path(path)
    speed = state.v.speed_at_centers()
    if pressure is None:
        pressure = state.pressure if state.pressure is not None else g.zeros_cells()
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# vtk DataFile Version 3.0\n")
            fh.write(f"phasechem fields step={state.step} t={state.t:.17g}\n")
            fh.write("ASCII\n")
            fh.write("DATASET STRUCTURED_POINTS\n")
            fh.write(f"DIMENSIONS {g.nx} {g.ny} 1\n")
            fh.write(f"ORIGIN {0.5 * g.hx:.17g} {0.5 * g.hy:.17g} 0\n")
            fh.write(f"SPACING {g.hx:.17g} {g.hy:.17g} 1\n")
            fh.write(f"POINT_DATA {g.nx * g.ny}\n")
            _vtk_scalar(fh, "phi", state.phi)
            _vtk_scalar(fh, "sigma", state.sigma)
            _vtk_scalar(fh, "speed", speed)
            _vtk_scalar(fh, "pressure", pressure)
    except OSError as exc:
        raise OSError(f"cannot write fields to {path}: {exc}") from exc
    return path


def write_manifest(directory, cfg: RunConfig, files, extras=None) -> Path:
    """Reproducibility manifest: config echo + hash, artifact list, constants."""
    directory = Path(directory)
    manifest = {
        "run_id": config_hash(cfg),
        "code_version": __version__,
        "config": serialize_config(cfg),
        "eps_reg": cfg.params.eps_reg,
        "stabilization": cfg.params.stabilization(),
        "files": sorted(str(Path(f).name) for f in files),
    }
    if extras:
        manifest.update(extras)
    path = directory / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
