import numpy as np
import pytest

from phasechem.coeffs import ModelParams
from phasechem.grid import Grid


@pytest.fixture
def grid():
    return Grid(32, 24, 1.0, 1.5)


@pytest.fixture
def square():
    return Grid(32, 32, 2.0 * np.pi, 2.0 * np.pi)


@pytest.fixture
def periodic():
    return Grid(32, 32, 2.0 * np.pi, 2.0 * np.pi, "periodic")


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.Philox(42))
