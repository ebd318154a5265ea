import math

import numpy as np
import pytest

from wignerflow import PhaseGrid, PhysicalParams, StateSpec
from wignerflow.wigner import WignerCalculator

# the two-state superposition used by the figure presets:
# cos(pi/3)|0> + sin(pi/3) e^{-i 7pi/4}|1>
SUPER_TERMS = (
    (0, complex(math.cos(math.pi / 3.0))),
    (1, math.sin(math.pi / 3.0) * complex(math.cos(-1.75 * math.pi),
                                          math.sin(-1.75 * math.pi))),
)


@pytest.fixture(scope="session")
def params():
    return PhysicalParams()


@pytest.fixture(scope="session")
def small_grid():
    """101 x 101 harmonic window, cheap enough for unit tests."""
    return PhaseGrid(-4.5, 4.5, 101, -4.5, 4.5, 101)


@pytest.fixture(scope="session")
def super_state():
    return StateSpec("harmonic", SUPER_TERMS)


@pytest.fixture(scope="session")
def small_calc(small_grid, params):
    return WignerCalculator("harmonic", (0, 1), small_grid, params=params)
