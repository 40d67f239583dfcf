import numpy as np
import pytest


def disk_matrix(rng, shape, radius):
    """I.i.d. entries uniform on the complex disk of the given radius."""
    r = radius * np.sqrt(rng.random(shape))
    return r * np.exp(2j * np.pi * rng.random(shape))


def ginibre(rng, n, m=None, scale=1.0):
    m = n if m is None else m
    return scale * (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def rel_err(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
