import numpy as np
import pytest

from cllab import fixtures
from cllab.infotheory import ClassPrior


@pytest.fixture
def uniform10():
    return ClassPrior.uniform(10)


@pytest.fixture
def q_dense_demo():
    return fixtures.demo_dense_biased_10()


@pytest.fixture
def q_sparse_demo():
    return fixtures.demo_sparse_biased_10()


def finite_difference(f, x, step=1e-5):
    """Central finite differences of a scalar function over a flat array."""
    g = np.zeros_like(x, dtype=float)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        hi = f(x)
        flat[i] = old - step
        lo = f(x)
        flat[i] = old
        gf[i] = (hi - lo) / (2 * step)
    return g


def max_rel_error(analytic, numeric):
    scale = max(1e-8, np.abs(numeric).max())
    return np.abs(analytic - numeric).max() / scale
