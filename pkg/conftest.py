# conftest.py - Shared Fixtures for the Test Suites

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from models import create_node_set, uniform_nodes
from empirical_measure import uniform_grid
from experiments import ExperimentConfig

settings.register_profile("uq", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("uq")

def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance-trend checks (run by default)")

@pytest.fixture
def three_nodes():
    return create_node_set([0.2, 0.5, 0.8])

@pytest.fixture
def unit_triangle():
    return create_node_set([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

@pytest.fixture
def example1_grid():
    return uniform_grid(-1.0, 1.0, 500)

@pytest.fixture
def small_grid():
    return uniform_grid(-1.0, 1.0, 60)

@pytest.fixture
def five_nodes():
    return uniform_nodes(-1.0, 1.0, 5)

@pytest.fixture
def rng():
    return np.random.default_rng(12345)

@pytest.fixture
def smoke_config():
    """Tiny example1 settings for harness plumbing tests"""
    def build(**overrides):
        values = dict(experiment="example1", basis="maxent", n_basis=3, n_samples=40, t_final=1.0, repeats=2, n_monte_carlo=200)
        values.update(overrides)
        return ExperimentConfig(**values)
    return build
