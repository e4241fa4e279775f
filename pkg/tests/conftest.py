import numpy as np
import pytest

from nsvfp import Grid, ModelParams, FluidState, KineticState, sample_maxwellian


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def grid():
    return Grid(nx=32, nv=32, v_max=8.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def maxwellian_state(grid, n_total=1.0, center=0.0):
    row = sample_maxwellian(n_total, center, grid.v_centers)
    return KineticState(np.tile(row, (grid.nx, 1)))


def constant_fluid(grid, rho=1.0, u=0.0):
    r = np.full(grid.nx, float(rho))
    return FluidState(r, r * u)
