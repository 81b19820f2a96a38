import os

import numpy as np
import pytest

import ccbo.strategy
from ccbo.benchmark import BenchmarkConfig, starting_observations
from ccbo.space import default_space

# surrogate self-checks (noiseless interpolation) stay on for the whole suite
os.environ["CCBO_DEBUG_CHECKS"] = "1"
ccbo.strategy.DEBUG_CHECKS = True


@pytest.fixture(scope="session")
def space():
    return default_space()


@pytest.fixture(scope="session")
def start_observations():
    return starting_observations(BenchmarkConfig(targets=(18.0,), repetitions=1))


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
