from __future__ import annotations

import pytest

from uavrelay.log import reset_logger
from uavrelay.mcsim import MonteCarloSimulator
from uavrelay.model import NetworkParams


@pytest.fixture(autouse=True)
def _fresh_logger():
    reset_logger()
    yield
    reset_logger()


@pytest.fixture
def params() -> NetworkParams:
    return NetworkParams()


@pytest.fixture
def small_sim() -> MonteCarloSimulator:
    """A simulator on a 20 km disk: the densities used in the tests never leave it empty."""
    return MonteCarloSimulator(n_drops=400, seed=11, disk_radius=20e3)
