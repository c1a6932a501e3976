import numpy as np
import pytest

from becflow.mesh import build_grid
from becflow.params import ModelParameters


@pytest.fixture(scope="session")
def physical():
    """The physically relevant parameter point (admissible for blow-up)."""
    return ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.4,
                           length=1.0, epsilon=1e-3)


@pytest.fixture(scope="session")
def grid256():
    return build_grid(256, 2.0, 1.0)


@pytest.fixture(scope="session")
def grid_uniform():
    return build_grid(128, 1.0, 1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
