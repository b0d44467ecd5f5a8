import numpy as np
import pytest
import scipy.linalg as sla

from deformed_pb import stream


@pytest.fixture
def rng(request):
    # one stream per test, keyed by the test name
    return stream(20241017, 0, request.node.name)


def block_frechet(fun, X, H):
    """Top-right block of ``fun([[X, H], [0, X]])``, i.e. the Frechet differential."""
    X = np.asarray(X)
    H = np.asarray(H)
    n = X.shape[0]
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, :n] = X
    M[n:, n:] = X
    M[:n, n:] = H
    return np.asarray(fun(M))[:n, n:]


def scipy_power(p):
    return lambda M: sla.fractional_matrix_power(M, p)
