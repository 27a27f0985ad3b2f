import hashlib

import numpy as np
import pytest

from phasechem_viz.plots import (PLOTTERS, plot_conservation, plot_energy,
                                 plot_separation, plot_sigma_sup,
                                 plot_snapshot)
from phasechem_viz.series import COLUMNS, SeriesFrame
from phasechem_viz.vtkread import read_vtk


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def flat_series(tmp_path, n=20):
    """Equilibrium-like series: constant energy, zero dissipation."""
    rows = []
    for k in range(n):
        vals = {c: 0.0 for c in COLUMNS}
        vals.update(t=k * 1e-3, step=k, mass_phi=1.0, mass_sigma=2.0,
                    E_ent=-3.0, E_total=-3.0, min_sigma=0.5, sep_margin=1.0,
                    sigma_linf=0.5)
        rows.append(",".join(f"{vals[c]:.17g}" for c in COLUMNS))
    path = tmp_path / "flat.csv"
    path.write_text(",".join(COLUMNS) + "\n" + "\n".join(rows) + "\n")
    return SeriesFrame.load(path)


# ---------------------------------------------------------------------------
# trivial flat-series cases
# ---------------------------------------------------------------------------

def test_energy_flat_series(tmp_path):
    series = flat_series(tmp_path)
    out = plot_energy(series, tmp_path / "energy.png")
    assert out.exists() and out.stat().st_size > 0
    # flat equilibrium: budget line coincides with the energy trace
    np.testing.assert_array_equal(series.dissipation_budget_line,
                                  series["E_total"])


@pytest.mark.parametrize("name", ["conservation", "separation", "sigma-sup"])
def test_flat_series_plots(tmp_path, name):
    series = flat_series(tmp_path)
    out = PLOTTERS[name](series, tmp_path / f"{name}.png")
    assert out.exists() and out.stat().st_size > 0


# ---------------------------------------------------------------------------
# fixture golden hashes and determinism
# ---------------------------------------------------------------------------

def test_fixture_figures_match_golden_hashes(tmp_path, fixture_csv,
                                             golden_hashes):
    series = SeriesFrame.load(fixture_csv)
    for name, plotter in PLOTTERS.items():
        out = plotter(series, tmp_path / f"{name}.png")
        assert sha(out) == golden_hashes[name], f"{name} figure changed"


def test_snapshot_matches_golden_hash(tmp_path, fixture_vtk, golden_hashes):
    snap = read_vtk(fixture_vtk)
    out = plot_snapshot(snap, tmp_path / "snapshot.png")
    assert sha(out) == golden_hashes["snapshot"]


def test_rendering_is_deterministic(tmp_path, fixture_csv):
    series = SeriesFrame.load(fixture_csv)
    a = plot_energy(series, tmp_path / "a.png")
    b = plot_energy(series, tmp_path / "b.png")
    assert sha(a) == sha(b)


def test_inputs_never_mutated(tmp_path, fixture_csv, fixture_vtk):
    before_csv = fixture_csv.read_bytes()
    before_vtk = fixture_vtk.read_bytes()
    series = SeriesFrame.load(fixture_csv)
    for name, plotter in PLOTTERS.items():
        plotter(series, tmp_path / f"{name}.png")
    plot_snapshot(read_vtk(fixture_vtk), tmp_path / "s.png")
    assert fixture_csv.read_bytes() == before_csv
    assert fixture_vtk.read_bytes() == before_vtk


# ---------------------------------------------------------------------------
# snapshot reader
# ---------------------------------------------------------------------------

def test_vtk_reader_fields(fixture_vtk):
    snap = read_vtk(fixture_vtk)
    assert list(snap.fields) == ["phi", "sigma", "speed", "pressure"]
    assert snap.fields["phi"].shape == (32, 32)
    assert snap.fields["sigma"].min() >= 0.0
    x0, x1, y0, y1 = snap.extent
    assert x1 - x0 == pytest.approx(2 * np.pi, rel=1e-12)


def test_vtk_reader_rejects_garbage(tmp_path):
    from phasechem_viz.vtkread import VtkFormatError
    bad = tmp_path / "bad.vtk"
    bad.write_text("not a vtk file\n")
    with pytest.raises(VtkFormatError):
        read_vtk(bad)
