import numpy as np
import pytest

from darboux_banded import BandedMatrix, UnitLowerBanded, make_dominant_banded


@pytest.fixture
def worked_L():
    """p = 2, N = 4 example: subdiagonals (2, 4, 6) and (3, 5)."""
    return UnitLowerBanded(4, 2, [[2.0, 4.0, 6.0], [3.0, 5.0]])


@pytest.fixture
def worked_A(worked_L):
    """A = L U0 with U0 = diag(1) + unit superdiagonal, so lu(A) returns worked_L."""
    U0 = np.eye(4) + np.diag(np.ones(3), 1)
    return BandedMatrix.from_dense(worked_L.to_dense() @ U0, 2, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit_lower(n, p, rng):
    """Random L with entries of modest size and a well-separated outer band."""
    bands = []
    for d in range(1, p + 1):
        b = rng.uniform(-1.0, 1.0, n - d)
        if d == p:
            b = np.sign(b) * (0.5 + np.abs(b))
        bands.append(b)
    return UnitLowerBanded(n, p, bands)


def dominant(n, p, q, seed, monic=False):
    return make_dominant_banded(n, p, q, seed, monic=monic)
