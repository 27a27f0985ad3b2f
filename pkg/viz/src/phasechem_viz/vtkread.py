"""Minimal reader for the solver's legacy ASCII VTK snapshots.

Supports exactly what the solver writes: STRUCTURED_POINTS with one or more
double SCALARS arrays at cell centers.  Not a general VTK parser.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class VtkFormatError(ValueError):
    pass


@dataclass
class VtkSnapshot:
    dimensions: tuple
    origin: tuple
    spacing: tuple
    fields: dict

    @property
    def extent(self):
        nx, ny, _ = self.dimensions
        x0, y0, _ = self.origin
        hx, hy, _ = self.spacing
        return (x0 - 0.5 * hx, x0 + (nx - 0.5) * hx,
                y0 - 0.5 * hy, y0 + (ny - 0.5) * hy)


def read_vtk(path) -> VtkSnapshot:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise VtkFormatError(f"cannot read {path}: {exc}") from exc

    def expect(i, prefix):
        if i >= len(lines) or not lines[i].startswith(prefix):
            raise VtkFormatError(f"{path}: expected '{prefix}' at line {i + 1}")
        return lines[i]

    expect(0, "# vtk DataFile")
    expect(2, "ASCII")
    expect(3, "DATASET STRUCTURED_POINTS")
    dims = tuple(int(v) for v in expect(4, "DIMENSIONS").split()[1:])
    origin = tuple(float(v) for v in expect(5, "ORIGIN").split()[1:])
    spacing = tuple(float(v) for v in expect(6, "SPACING").split()[1:])
    npoints = int(expect(7, "POINT_DATA").split()[1])
    if len(dims) != 3 or npoints != int(np.prod(dims)):
        raise VtkFormatError(f"{path}: POINT_DATA count does not match dimensions")

    fields = {}
    i = 8
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.startswith("SCALARS"):
            raise VtkFormatError(f"{path}: unexpected record '{line}' at line {i + 1}")
        name = line.split()[1]
        expect(i + 1, "LOOKUP_TABLE")
        values = lines[i + 2:i + 2 + npoints]
        if len(values) < npoints:
            raise VtkFormatError(f"{path}: truncated data for field '{name}'")
        arr = np.array([float(v) for v in values])
        # x varies fastest in the file; store as [ix, iy]
        fields[name] = arr.reshape((dims[1], dims[0])).T
        i += 2 + npoints
    if not fields:
        raise VtkFormatError(f"{path}: no scalar fields found")
    return VtkSnapshot(dims, origin, spacing, fields)
