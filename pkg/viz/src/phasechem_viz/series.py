"""Reader for the solver's diagnostics CSV.

The schema is fixed by the solver: a header line with the column names below,
then one row per recorded step.  The frame validates column presence and the
monotonicity of the time axis before any figure is drawn, so a truncated or
foreign CSV fails loudly instead of producing a misleading plot.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = ("t", "step", "mass_phi", "mass_sigma", "E_kin", "E_mix", "E_ent",
           "E_int", "E_total", "D_visc", "D_mu", "D_sigma", "min_sigma",
           "max_abs_phi", "sep_margin", "sigma_linf", "energy_residual")


class SchemaError(ValueError):
    """The CSV does not match the documented diagnostics schema."""


@dataclass
class SeriesFrame:
    path: str
    data: dict

    @classmethod
    def load(cls, path) -> "SeriesFrame":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read {path}: {exc}") from exc
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise SchemaError(f"{path}: empty file")
        header = tuple(name.strip() for name in lines[0].split(","))
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        rows = []
        for i, ln in enumerate(lines[1:], start=2):
            parts = ln.split(",")
            if len(parts) != len(header):
                raise SchemaError(f"{path}:{i}: expected {len(header)} fields, "
                                  f"got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise SchemaError(f"{path}:{i}: {exc}") from exc
        if not rows:
            raise SchemaError(f"{path}: no data rows")
        arr = np.asarray(rows)
        data = {name: arr[:, header.index(name)] for name in COLUMNS}
        t = data["t"]
        if np.any(np.diff(t) < 0):
            raise SchemaError(f"{path}: time column is not monotone")
        return cls(str(path), data)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]

    def __len__(self) -> int:
        return len(self.data["t"])

    @property
    def dissipation_budget_line(self) -> np.ndarray:
        """E(0) minus the accumulated dissipation, i.e. E(t) - residual."""
        return self.data["E_total"] - self.data["energy_residual"]
