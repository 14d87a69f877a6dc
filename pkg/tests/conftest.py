import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_psd(rng, n, rank=None):
    G = rng.standard_normal((rank or n, n))
    return G.T @ G


def random_sym(rng, n):
    A = rng.standard_normal((n, n))
    return 0.5 * (A + A.T)
