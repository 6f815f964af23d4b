import numpy as np
import pytest

from qvol.linalg import BipartiteDims
from qvol.sampling import DensityMatrix

D22 = BipartiteDims(2, 2)


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def pure(v, dims=D22):
    return DensityMatrix.from_matrix(np.outer(v, v.conj()), dims)


def bell_matrix():
    v = ket(1, 0, 0, 1)
    return np.outer(v, v.conj())


def werner_matrix(x):
    return x * bell_matrix() + (1 - x) * np.eye(4) / 4


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_density(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell():
    return DensityMatrix.from_matrix(bell_matrix(), D22)


@pytest.fixture
def maximally_mixed():
    return DensityMatrix.from_matrix(np.eye(4) / 4, D22)


@pytest.fixture
def product_pure():
    """|01><01|"""
    return pure(ket(0, 1, 0, 0))
