from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def fixture_csv():
    return DATA / "fixture_timeseries.csv"


@pytest.fixture
def fixture_vtk():
    return DATA / "fixture_fields.vtk"


@pytest.fixture
def golden_hashes():
    import json
    return json.loads((DATA / "golden_hashes.json").read_text())
