import numpy as np
import pytest

from cba.problems.core.config import ConfigLoader
from cba.problems.core.data_io import generate_synthetic_dro
from cba.problems.dro_internal import DroInstance
from cba.problems.matrix_game_internal import MatrixGameInternal

def defaults():
    # an empty path skips config.json so tests only see the built-in defaults
    return ConfigLoader("")

def matrix_game(payoff):
    return MatrixGameInternal(np.asarray(payoff, dtype=float), config=defaults())

def dro_instance(n=50, m=50, seed=0, **kwargs):
    dataset = generate_synthetic_dro(n, m, "normal", 0.1, seed)
    return DroInstance(dataset.features, dataset.labels, config=defaults(), **kwargs)

@pytest.fixture
def config():
    return defaults()

@pytest.fixture
def pennies():
    return matrix_game([[0.0, 1.0], [1.0, 0.0]])
