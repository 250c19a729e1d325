#tests/conftest.py
"""Shared fixtures: import path, seeded generators and the ``slow`` marker."""

import os
import sys

import numpy as np
import pytest

# Add the project root to the Python path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance runs (EBM, uniqueness)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_grid():
    from src.accretive.banach import TimeGrid

    return TimeGrid(1.0, 100)
