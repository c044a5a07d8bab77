import math

import pytest

from fanocavity import Topology, default_params

OMEGA_M = 2 * math.pi * 51.8e6


@pytest.fixture
def preset():
    """Reference device constants, g = 0."""
    return default_params()


@pytest.fixture
def fixed_ends():
    return Topology.FIXED_ENDS


@pytest.fixture
def double_movable():
    return Topology.DOUBLE_MOVABLE
