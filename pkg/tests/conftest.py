import numpy as np
import pytest

from meanrotor import ModelParams


@pytest.fixture
def params310():
    return ModelParams(beta=3.0, q=10)


@pytest.fixture
def params2310():
    return ModelParams(beta=2.3, q=10)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
