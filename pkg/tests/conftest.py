import numpy as np
import pytest

from deltanls import GridFunction, Params, make_grid
from deltanls.groundstate import soliton_value

P = 7.0


@pytest.fixture(scope="session")
def params():
    return Params(gamma=-1.0, p=P, omega=1.0)


@pytest.fixture(scope="session")
def free_params():
    return Params(gamma=0.0, p=P, omega=1.0)


@pytest.fixture(scope="session")
def grid():
    # h ~ 0.0146; tails of the omega=1 solitons are ~1e-37 at |x|=30
    return make_grid(30.0, 4097)


@pytest.fixture(scope="session")
def fine_grid():
    return make_grid(28.0, 65537)


@pytest.fixture(scope="session")
def soliton(grid, params):
    return GridFunction(
        grid, soliton_value(1.0, params.gamma, P, grid.x).astype(complex)
    )


@pytest.fixture(scope="session")
def free_soliton_fn(grid):
    return GridFunction(grid, soliton_value(1.0, 0.0, P, grid.x).astype(complex))


@pytest.fixture()
def rng():
    return np.random.default_rng(314159)


def random_smooth(grid, rng, amp=1.0):
    x = grid.x
    center = rng.uniform(-6.0, 6.0)
    width = rng.uniform(0.8, 3.0)
    env = np.exp(-((x - center) ** 2) / (2.0 * width**2))
    osc = np.zeros_like(x, dtype=complex)
    for _ in range(3):
        k = rng.uniform(-2.0, 2.0)
        osc += (rng.normal() + 1j * rng.normal()) * np.exp(1j * k * x)
    return GridFunction(grid, amp * env * osc)
