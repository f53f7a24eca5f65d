import numpy as np
import pytest

from src.heatkernel import GridFunction, Torus
from src.particles import GaussianBump


@pytest.fixture
def line():
    """A small 1-d torus for solver tests."""
    return Torus(1, 8.0, 32)


@pytest.fixture
def fine_line():
    return Torus(1, 32.0, 256)


@pytest.fixture
def bump_datum(line):
    return GridFunction.from_callable(line, GaussianBump((0.0,), 1.0))


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    # experiment configs must not pick up a developer's shell overrides
    for name in ("SBMRE_SEED", "SBMRE_WORKERS"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
