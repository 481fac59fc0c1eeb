import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from darboux_banded import (
    BandedMatrix,
    BidiagonalFactor,
    DimensionError,
    FactorChain,
    UnitLowerBanded,
    UpperBanded,
    band_get,
    multiply_chain,
    residual_inf_norm,
)


def dense_band(n, p, q, rng):
    M = rng.uniform(-1, 1, (n, n))
    return np.triu(np.tril(M, q), -p)


class TestBandGet:
    def test_identity_diagonal(self):
        assert band_get(BandedMatrix.identity(5), 3, 3) == 1.0

    def test_identity_outside_band(self):
        assert band_get(BandedMatrix.identity(5), 3, 4) == 0.0

    def test_subdiagonal_read(self):
        A = BandedMatrix(4, 2, 0, [[3.0, 5.0], [0.0, 0.0, 0.0], [1.0] * 4])
        assert band_get(A, 2, 0) == 3.0
        assert band_get(A, 3, 1) == 5.0

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            band_get(BandedMatrix.identity(3), 3, 0)
        with pytest.raises(IndexError):
            band_get(BandedMatrix.identity(3), 0, -1)

    def test_band_length_checked(self):
        with pytest.raises(DimensionError):
            BandedMatrix(4, 1, 0, [[1.0, 2.0], [1.0] * 4])

    def test_bandwidth_must_be_below_order(self):
        with pytest.raises(DimensionError):
            BandedMatrix(2, 2, 0, [[], [1.0], [1.0, 1.0]])


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 12),
    p=st.integers(0, 4),
    q=st.integers(0, 4),
    data=st.data(),
)
def test_storage_round_trip(n, p, q, data):
    p, q = min(p, n - 1), min(q, n - 1)
    A = BandedMatrix.identity(n, p, q)
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(max(0, i - p), min(n - 1, i + q)))
    value = data.draw(st.floats(allow_nan=False, allow_infinity=False))
    B = A.replace_entry(i, j, value)
    assert band_get(B, i, j) == value
    assert np.array_equal(B.to_dense()[i], np.where(np.arange(n) == j, value, A.to_dense()[i]))


def test_dense_round_trip(rng):
    M = dense_band(9, 2, 3, rng)
    A = BandedMatrix.from_dense(M)
    assert (A.lower_bw, A.upper_bw) == (2, 3)
    assert np.array_equal(A.to_dense(), M)
    assert np.array_equal(BandedMatrix.from_row_aligned(A.row_aligned(), 2, 3).to_dense(), M)


def test_from_dense_rejects_out_of_band(rng):
    with pytest.raises(DimensionError):
        BandedMatrix.from_dense(dense_band(6, 2, 1, rng), 1, 1)


def test_matvec_and_transpose(rng):
    M = dense_band(10, 3, 2, rng)
    A = BandedMatrix.from_dense(M)
    x = rng.standard_normal(10)
    np.testing.assert_allclose(A @ x, M @ x, rtol=1e-14, atol=1e-14)
    assert np.array_equal(A.T.to_dense(), M.T)


def test_immutable(rng):
    A = BandedMatrix.from_dense(dense_band(5, 1, 1, rng))
    with pytest.raises(ValueError):
        A.band(0)[0] = 7.0


class TestMultiplyChain:
    def test_worked_pair(self):
        # dense oracle: (I + N1)(I + N2) for the two subdiagonals below
        f1 = BidiagonalFactor.unit_lower([1.0, 3.0, 5.0])
        f2 = BidiagonalFactor.unit_lower([1.0, 1.0, 1.0])
        P = multiply_chain(FactorChain((f1, f2)))
        dense = f1.to_dense() @ f2.to_dense()
        assert np.array_equal(P.to_dense(), dense)
        assert P.band(-1).tolist() == [2.0, 4.0, 6.0]
        assert P.band(-2).tolist() == [3.0, 5.0]
        assert (P.lower_bw, P.upper_bw) == (2, 0)

    def test_single_factor_is_itself(self):
        f = BidiagonalFactor.unit_lower([0.5, -2.0, 3.0])
        P = multiply_chain(FactorChain((f,)))
        assert P == f.to_banded()

    def test_identities(self):
        ident = BidiagonalFactor.unit_lower(np.zeros(4))
        up = BidiagonalFactor(5, "upper", None, np.zeros(4))
        P = multiply_chain(FactorChain((ident, ident), (up,)))
        assert np.array_equal(P.to_dense(), np.eye(5))
        assert (P.lower_bw, P.upper_bw) == (2, 1)

    def test_order_mismatch(self):
        with pytest.raises(DimensionError):
            multiply_chain(
                FactorChain((BidiagonalFactor.unit_lower([1.0]), BidiagonalFactor.unit_lower([1.0, 2.0])))
            )

    def test_empty_chain(self):
        with pytest.raises(DimensionError):
            multiply_chain(FactorChain())


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(3, 12),
    a=st.lists(st.floats(-5, 5), min_size=11, max_size=11),
    b=st.lists(st.floats(-5, 5), min_size=11, max_size=11),
)
def test_two_factor_closed_form(n, a, b):
    a, b = np.array(a[: n - 1]), np.array(b[: n - 1])
    P = multiply_chain(FactorChain((BidiagonalFactor.unit_lower(a), BidiagonalFactor.unit_lower(b))))
    np.testing.assert_array_equal(P.band(-1), a + b)
    np.testing.assert_array_equal(P.band(-2), a[1:] * b[:-1])
    dense = BidiagonalFactor.unit_lower(a).to_dense() @ BidiagonalFactor.unit_lower(b).to_dense()
    np.testing.assert_allclose(P.to_dense(), dense, rtol=0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(4, 12),
    p=st.integers(0, 3),
    q=st.integers(0, 3),
    seed=st.integers(0, 2**32 - 1),
)
def test_chain_bandwidths_and_dense_agreement(n, p, q, seed):
    rng = np.random.default_rng(seed)
    lows = [BidiagonalFactor.unit_lower(rng.uniform(-1, 1, n - 1)) for _ in range(p)]
    ups = [BidiagonalFactor(n, "upper", rng.uniform(1, 2, n), rng.uniform(-1, 1, n - 1)) for _ in range(q)]
    if p + q == 0:
        return
    P = multiply_chain(FactorChain(lows, ups))
    assert P.lower_bw <= p and P.upper_bw <= q
    dense = np.eye(n)
    for f in lows + ups:
        dense = dense @ f.to_dense()
    np.testing.assert_allclose(P.to_dense(), dense, rtol=1e-13, atol=1e-13)


class TestResidual:
    def test_self_is_zero(self, rng):
        A = BandedMatrix.from_dense(dense_band(6, 2, 1, rng))
        assert residual_inf_norm(A, A) == 0.0

    def test_hand_norm(self):
        A = BandedMatrix.identity(2, 1, 0)
        B = A.replace_entry(1, 0, 0.5)
        assert residual_inf_norm(A, B) == 0.5

    def test_zero_reference(self):
        Z = BandedMatrix(3, 0, 0, [np.zeros(3)])
        with pytest.raises(ZeroDivisionError):
            residual_inf_norm(Z, BandedMatrix.identity(3))

    def test_bandwidths_padded(self):
        A = BandedMatrix.identity(4)
        B = BandedMatrix.identity(4, 1, 1).replace_entry(0, 1, 2.0)
        assert residual_inf_norm(A, B) == 2.0


def test_unit_lower_and_upper_accessors():
    L = UnitLowerBanded(4, 2, [[2.0, 4.0, 6.0], [3.0, 5.0]])
    assert L.get(2, 2) == 1.0 and L.get(2, 0) == 3.0 and L.get(3, 2) == 6.0 and L.get(3, 0) == 0.0
    assert UnitLowerBanded.from_banded(L.to_banded()).get(3, 1) == 5.0
    U = UpperBanded(3, 1, [2.0, 3.0, 4.0], [[1.0, 1.0]])
    assert U.is_monic
    assert not UpperBanded(3, 1, [2.0, 3.0, 4.0], [[1.0, 2.0]]).is_monic
    assert U.get(0, 1) == 1.0 and U.get(1, 0) == 0.0
