"""Post-processing figures for phasechem runs.

Read-only consumers of the solver's CSV time series and legacy VTK field
snapshots; no solver import, only the documented file formats.
"""

__version__ = "0.1.0"

from .series import SchemaError, SeriesFrame
from .vtkread import VtkFormatError, VtkSnapshot, read_vtk
from .plots import (plot_conservation, plot_energy, plot_separation,
                    plot_sigma_sup, plot_snapshot)

__all__ = [
    "SchemaError", "SeriesFrame", "VtkFormatError", "VtkSnapshot", "read_vtk",
    "plot_conservation", "plot_energy", "plot_separation", "plot_sigma_sup",
    "plot_snapshot",
]
