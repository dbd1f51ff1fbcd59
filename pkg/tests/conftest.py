import math
import warnings

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

# worked 5x5 example and the matrices printed alongside it
EXAMPLE_A = np.array([
    [2, 5, 2, 2, 5],
    [6, 6, 2, 3, 1],
    [7, 3, 5, 5, 3],
    [3, 3, 4, 6, 8],
    [2, 4, 2, 5, 5],
], dtype=float)

EXAMPLE_C0 = np.array([
    [2, 2, 2, 5, 5],
    [1, 2, 3, 6, 6],
    [3, 3, 5, 5, 7],
    [3, 3, 4, 6, 8],
    [2, 2, 4, 5, 5],
], dtype=float)

EXAMPLE_P = np.array([
    [1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
])

EXAMPLE_FINAL_C = np.array([
    [2, 2, 2, 5, 5],
    [2, 2, 4, 5, 5],
    [1, 2, 3, 6, 6],
    [3, 3, 5, 5, 7],
    [3, 3, 4, 6, 8],
], dtype=float)

EXAMPLE_WITNESS = np.array([
    [2, 2, 5, 5, 2],
    [1, 3, 6, 6, 2],
    [3, 5, 5, 7, 3],
    [3, 4, 6, 8, 3],
    [2, 4, 5, 5, 2],
], dtype=float)

EXAMPLE_X1 = np.array([0.3561, 0.4098, 0.5091, 0.5301, 0.4063])
EXAMPLE_X2 = np.array([0.3595, 0.3987, 0.4116, 0.5055, 0.5355])
EXAMPLE_RHO_MAX = 20.9863


def rho_2x2(M) -> float:
    """Largest root of the characteristic polynomial of a 2x2 matrix."""
    (a, b), (c, d) = np.asarray(M, dtype=float)
    tr, det = a + d, a * d - b * c
    return (tr + math.sqrt(tr * tr - 4 * det)) / 2


def nonneg_matrices(min_n=1, max_n=4, min_value=0.0, max_value=10.0):
    return st.integers(min_n, max_n).flatmap(
        lambda n: arrays(np.float64, (n, n),
                         elements=st.floats(min_value, max_value, allow_nan=False, allow_infinity=False)))


def positive_int_matrices(min_n=2, max_n=4):
    return st.integers(min_n, max_n).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.integers(1, 9).map(float)))


@pytest.fixture
def example_A():
    return EXAMPLE_A.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow exhaustive checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
