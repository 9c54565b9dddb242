import numpy as np
import pytest

from carleman_lab.harmonics import build_grid
from carleman_lab.spectra import sphere_spectrum


@pytest.fixture(scope="session")
def sphere3_50():
    return sphere_spectrum(3, 50)


@pytest.fixture(scope="session")
def grid8():
    return build_grid(8)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
