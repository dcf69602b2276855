import numpy as np
import pytest

from deepwave.field import Grid
from deepwave.hnls import gaussian

SLOW_LENGTH = 2 * np.pi * 3.2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def slow_grid():
    return Grid.square(64, SLOW_LENGTH)


@pytest.fixture(scope="session")
def small_grid():
    return Grid.square(32, SLOW_LENGTH)


@pytest.fixture(scope="session")
def envelope(slow_grid):
    return gaussian(slow_grid, 1.0, 1.5)
