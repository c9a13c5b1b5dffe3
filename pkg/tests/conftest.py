import sys

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from corechase.rotations import UNIT_ROUNDOFF

u = UNIT_ROUNDOFF


def match_error(x, y) -> float:
    """Largest distance after the optimal pairing of two root multisets."""
    x = np.asarray(x, np.complex128)
    y = np.asarray(y, np.complex128)
    assert x.size == y.size, f"{x.size} roots vs {y.size}"
    if x.size == 0:
        return 0.0
    cost = np.abs(x[:, None] - y[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def random_complex(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def unity_roots(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session", autouse=True)
def _compile_kernels():
    # the first call of each njit kernel compiles (or loads the cache); keep
    # that out of the timed tests
    from corechase import solve_qr, solve_qz
    solve_qr([-1, 0, 0, 1])
    solve_qz([-1, 0, 0, 1])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
