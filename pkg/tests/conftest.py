import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_cloud(rng, n, d=2):
    """Uniform points in the unit cube; duplicates have probability zero."""
    return rng.random((n, d))
