"""The four standard diagnostic figures plus field snapshots.

Each function takes a SeriesFrame (or VTK snapshot) and an output path and
writes one figure.  Figures are rendered with a fixed, self-contained style
under the Agg backend, so identical inputs produce identical files; the
scripts never modify their inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .series import SeriesFrame
from .vtkread import VtkSnapshot

STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.framealpha": 0.9,
    "svg.hashsalt": "phasechem-viz",
}

_SAVE_KW = {"metadata": {"Software": None}}


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    kw = dict(_SAVE_KW) if out_path.suffix.lower() == ".png" else {}
    fig.savefig(out_path, **kw)
    plt.close(fig)
    return out_path


def plot_energy(series: SeriesFrame, out_path) -> Path:
    """Total energy against the dissipation budget, plus their gap.

    The budget line is E(0) minus the accumulated dissipation; the lower
    panel shows the inequality residual with its tolerance band.
    """
    t = series["t"]
    e = series["E_total"]
    budget = series.dissipation_budget_line
    resid = series["energy_residual"]
    tol = 1e-3 * abs(e[0]) if e[0] != 0 else 1e-3
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(
            2, 1, sharex=True, figsize=(7.0, 5.5),
            gridspec_kw={"height_ratios": [2.2, 1.0]})
        ax0.plot(t, e, label="total energy E(t)", color="tab:blue")
        ax0.plot(t, budget, "--", label="E(0) $-$ accumulated dissipation",
                 color="tab:orange")
        ax0.set_ylabel("energy")
        ax0.legend(loc="best")
        ax0.set_title("energy decay and dissipation budget")
        ax1.axhspan(-tol, tol, color="tab:green", alpha=0.15,
                    label="tolerance band")
        ax1.plot(t, resid, color="tab:red", label="inequality residual")
        ax1.set_xlabel("t")
        ax1.set_ylabel("E(t) + $\\int$D $-$ E(0)")
        ax1.legend(loc="best")
        fig.tight_layout()
        return _save(fig, out_path)


def plot_conservation(series: SeriesFrame, out_path) -> Path:
    """Drift of both conserved masses from their initial values."""
    t = series["t"]
    dphi = series["mass_phi"] - series["mass_phi"][0]
    dsig = series["mass_sigma"] - series["mass_sigma"][0]
    with plt.rc_context(STYLE):
        fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 5.0))
        ax0.plot(t, dphi, color="tab:blue")
        ax0.set_ylabel("$\\int\\phi$ drift")
        ax0.set_title("mass conservation drift")
        ax1.plot(t, dsig, color="tab:purple")
        ax1.set_ylabel("$\\int\\sigma$ drift")
        ax1.set_xlabel("t")
        fig.tight_layout()
        return _save(fig, out_path)


def plot_separation(series: SeriesFrame, out_path) -> Path:
    """Separation margin 1 - max|phi| with the acceptance threshold."""
    t = series["t"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, series["sep_margin"], color="tab:blue", label="1 $-$ max|$\\phi$|")
        ax.axhline(1e-3, color="tab:red", ls="--", label="threshold $10^{-3}$")
        ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("separation margin")
        ax.set_title("distance of the phase field from the pure phases")
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, out_path)


def plot_sigma_sup(series: SeriesFrame, out_path) -> Path:
    """Running sup-norm of the concentration with the 3x-initial marker."""
    t = series["t"]
    sup = series["sigma_linf"]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, sup, color="tab:blue", label="running max $\\|\\sigma\\|_\\infty$")
        ax.axhline(3.0 * sup[0], color="tab:red", ls="--", label="3x initial")
        ax.set_xlabel("t")
        ax.set_ylabel("$\\|\\sigma\\|_\\infty$")
        ax.set_ylim(bottom=0.0)
        ax.set_title("concentration boundedness trace")
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, out_path)


def plot_snapshot(snapshot: VtkSnapshot, out_path) -> Path:
    """Side-by-side panels of the snapshot fields."""
    names = list(snapshot.fields)
    cmaps = {"phi": "RdBu_r", "sigma": "viridis", "speed": "magma",
             "pressure": "cividis"}
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(names),
                                 figsize=(3.1 * len(names), 3.4))
        if len(names) == 1:
            axes = [axes]
        for ax, name in zip(axes, names):
            data = snapshot.fields[name]
            im = ax.imshow(data.T, origin="lower", extent=snapshot.extent,
                           cmap=cmaps.get(name, "viridis"), aspect="equal")
            ax.set_title(name)
            fig.colorbar(im, ax=ax, shrink=0.75)
        fig.tight_layout()
        return _save(fig, out_path)


PLOTTERS = {
    "energy": plot_energy,
    "conservation": plot_conservation,
    "separation": plot_separation,
    "sigma-sup": plot_sigma_sup,
}
