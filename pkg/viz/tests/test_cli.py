from phasechem_viz.cli import main


def test_cli_all_regenerates_four_figures(tmp_path, fixture_csv):
    out = tmp_path / "figs"
    code = main(["all", "--input", str(fixture_csv), "--out", str(out)])
    assert code == 0
    names = sorted(p.name for p in out.glob("*.png"))
    assert names == ["conservation.png", "energy.png", "separation.png",
                     "sigma_sup.png"]


def test_cli_single_figure(tmp_path, fixture_csv):
    out = tmp_path / "energy.png"
    assert main(["energy", "--input", str(fixture_csv), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_snapshot(tmp_path, fixture_vtk):
    out = tmp_path / "snap.png"
    assert main(["snapshot", "--input", str(fixture_vtk), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_run_directory_input(tmp_path, fixture_csv, fixture_vtk):
    run_dir = tmp_path / "run"
    run_dir.mkdir()
    (run_dir / "timeseries.csv").write_bytes(fixture_csv.read_bytes())
    (run_dir / "fields_000200.vtk").write_bytes(fixture_vtk.read_bytes())
    out = tmp_path / "figs"
    assert main(["all", "--input", str(run_dir), "--out", str(out)]) == 0
    assert (out / "fields_000200.png").exists()


def test_cli_schema_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["energy", "--input", str(bad), "--out",
                 str(tmp_path / "x.png")]) == 2


def test_cli_missing_file_exit_code(tmp_path):
    assert main(["energy", "--input", str(tmp_path / "none.csv"), "--out",
                 str(tmp_path / "x.png")]) == 2
