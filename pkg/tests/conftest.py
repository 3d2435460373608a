"""Shared fixtures: one standard parameter point and cached field data.

Field construction costs a few FFTs at 512^2, so the standard initial
data is built once per session and treated as immutable by every test.
"""

import numpy as np
import pytest

from emhd25.initial_data import make_initial_data
from emhd25.params import ParamSet
from emhd25.spectral import Field, Grid
from emhd25.state import State


@pytest.fixture(scope="session")
def p8():
    """Standard admissible parameter point at lam = 8."""
    return ParamSet(lam=8.0, beta=3.5, gamma=1.2, zeta=1.48)


@pytest.fixture(scope="session")
def grid512():
    """512^2 grid on the lam = 8 box."""
    return Grid(n=512, L=1.0)


@pytest.fixture(scope="session")
def grid256():
    return Grid(n=256, L=1.0)


@pytest.fixture(scope="session")
def state8(p8, grid512):
    """Full initial data at the standard point, shared read-only."""
    return make_initial_data(p8, grid512)


@pytest.fixture(scope="session")
def radial_pair(grid256):
    """Mean-free-in-angle radial Gaussian pair, a stationary configuration.

    Widths keep the box-edge values below the double-precision floor so
    the periodic seam cannot leak into high derivatives.
    """
    X, Y = grid256.meshes()
    r2 = X**2 + Y**2
    a = Field.from_values(grid256, np.exp(-40.0 * r2))
    b = Field.from_values(grid256, 0.5 * np.exp(-30.0 * r2))
    return State(a=a, b=b, t=0.0)
