import math

import pytest

from quasilandau.analytic import Sector
from quasilandau.units import PhysParams


@pytest.fixture
def nat():
    """hbar = m = 1 with omega_c(kx=1) = 1."""
    return PhysParams.natural()


@pytest.fixture
def confined():
    return Sector(1.0, 1)


@pytest.fixture
def paper_params():
    return PhysParams(alpha=3.6e-16, gamma=1e10)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def ring_lx():
    # kx = 1 is the 8th ring mode
    return 2 * math.pi * 8
