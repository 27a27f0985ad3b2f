import numpy as np
import pytest

from phasechem_viz.series import COLUMNS, SchemaError, SeriesFrame


def test_load_fixture(fixture_csv):
    frame = SeriesFrame.load(fixture_csv)
    assert len(frame) == 101
    assert frame["t"][0] == 0.0
    assert np.all(np.diff(frame["t"]) > 0)
    for col in COLUMNS:
        assert col in frame.data


def test_budget_line_matches_residual(fixture_csv):
    frame = SeriesFrame.load(fixture_csv)
    np.testing.assert_allclose(
        frame.dissipation_budget_line,
        frame["E_total"] - frame["energy_residual"], rtol=0)


def test_missing_column_rejected(tmp_path, fixture_csv):
    lines = fixture_csv.read_text().splitlines()
    header = lines[0].split(",")
    idx = header.index("sep_margin")
    broken = [",".join(h for i, h in enumerate(header) if i != idx)]
    for ln in lines[1:]:
        parts = ln.split(",")
        broken.append(",".join(p for i, p in enumerate(parts) if i != idx))
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(broken) + "\n")
    with pytest.raises(SchemaError, match="sep_margin"):
        SeriesFrame.load(bad)


def test_non_monotone_time_rejected(tmp_path, fixture_csv):
    lines = fixture_csv.read_text().splitlines()
    lines[2], lines[10] = lines[10], lines[2]
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="monotone"):
        SeriesFrame.load(bad)


def test_header_only_rejected(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text(",".join(COLUMNS) + "\n")
    with pytest.raises(SchemaError, match="no data rows"):
        SeriesFrame.load(bad)


def test_ragged_row_rejected(tmp_path, fixture_csv):
    lines = fixture_csv.read_text().splitlines()
    lines[3] = lines[3] + ",1.0"
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="expected"):
        SeriesFrame.load(bad)
