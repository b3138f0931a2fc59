import numpy as np
import pytest

from gramentropy import GaussianKernel, SymMatrix, gram, to_density


def random_gram(rng, n, d=2, sigma=1.0):
    """Gaussian Gram matrix on random standard-normal data."""
    return gram(rng.standard_normal((n, d)), GaussianKernel(sigma))


def random_density(rng, n, d=2, sigma=1.0):
    return to_density(random_gram(rng, n, d=d, sigma=sigma))


def random_orthonormal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def diag_density(p):
    """DensityState with the given (nonnegative, sum-1) diagonal."""
    from gramentropy import DensityState

    return DensityState(SymMatrix(np.diag(np.asarray(p, dtype=np.float64))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
