import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from darboux_banded import (
    BandedMatrix,
    BidiagonalFactor,
    DimensionError,
    FactorChain,
    FreeParameters,
    NotFactorizable,
    PivotBreakdown,
    SingularUpper,
    UnitLowerBanded,
    UpperBanded,
    darboux_factor,
    darboux_factor_upper,
    multiply_chain,
    residual_inf_norm,
    solve_banded,
    solve_chain,
    solve_unit_lower_bidiagonal,
    solve_upper_bidiagonal,
)
from darboux_banded.oracle import dense_solve

from conftest import dominant


def random_upper(n, q, rng):
    sups = [rng.uniform(-1, 1, n - d) for d in range(1, q + 1)]
    sups[-1] = np.sign(sups[-1]) * (0.5 + np.abs(sups[-1]))
    return UpperBanded(n, q, rng.uniform(2.0, 3.0, n) * rng.choice([-1, 1], n), sups)


def random_chain(n, p, q, rng):
    lows = [BidiagonalFactor.unit_lower(rng.uniform(-0.5, 0.5, n - 1)) for _ in range(p)]
    ups = [BidiagonalFactor(n, "upper", rng.uniform(1.0, 2.0, n), rng.uniform(-0.5, 0.5, n - 1))]
    ups += [BidiagonalFactor(n, "upper", None, rng.uniform(-0.5, 0.5, n - 1)) for _ in range(q - 1)]
    return FactorChain(lows, ups)


class TestBidiagonalSubstitution:
    def test_identity_lower(self):
        b = np.array([3.0, -1.0, 2.0])
        assert solve_unit_lower_bidiagonal(BidiagonalFactor.unit_lower(np.zeros(2)), b).tolist() == b.tolist()

    def test_hand_forward(self):
        f = BidiagonalFactor.unit_lower([1.0, 1.0, 1.0])
        assert solve_unit_lower_bidiagonal(f, np.ones(4)).tolist() == [1.0, 0.0, 1.0, 0.0]

    def test_lower_dense_oracle(self, rng):
        f = BidiagonalFactor.unit_lower(rng.uniform(-1, 1, 49))
        b = rng.standard_normal(50)
        np.testing.assert_allclose(solve_unit_lower_bidiagonal(f, b), dense_solve(f.to_dense(), b), rtol=0, atol=1e-13)

    def test_lower_length_mismatch(self):
        with pytest.raises(DimensionError):
            solve_unit_lower_bidiagonal(BidiagonalFactor.unit_lower([1.0]), np.ones(3))

    def test_identity_upper(self):
        U = UpperBanded(3, 1, np.ones(3), [np.zeros(2)])
        assert solve_upper_bidiagonal(U, np.array([1.0, 2.0, 3.0])).tolist() == [1.0, 2.0, 3.0]

    def test_hand_backward(self):
        U = UpperBanded(2, 1, [2.0, 3.0], [[1.0]])
        # x_1 = 6/3, x_0 = (5 - 2)/2
        assert solve_upper_bidiagonal(U, np.array([5.0, 6.0])).tolist() == [1.5, 2.0]

    def test_upper_dense_oracle(self, rng):
        U = UpperBanded(50, 1, rng.uniform(1, 2, 50), [rng.uniform(-1, 1, 49)])
        b = rng.standard_normal(50)
        np.testing.assert_allclose(solve_upper_bidiagonal(U, b), dense_solve(U.to_dense(), b), rtol=0, atol=1e-13)

    def test_singular_upper(self):
        with pytest.raises(SingularUpper) as info:
            solve_upper_bidiagonal(UpperBanded(3, 1, [1.0, 0.0, 2.0], [[1.0, 1.0]]), np.ones(3))
        assert info.value.index == 1


class TestSolveChain:
    def test_identity_chain(self):
        ident = BidiagonalFactor.unit_lower(np.zeros(3))
        b = np.array([1.0, -2.0, 3.0, 0.5])
        report = solve_chain(FactorChain((ident, ident)), b)
        assert report.x.tolist() == b.tolist()
        assert report.stages == 2

    def test_worked_chain(self, worked_L):
        chain, _, _ = darboux_factor(worked_L, FreeParameters(2, (1.0,)))
        ident_u = BidiagonalFactor(4, "upper", np.ones(4), np.zeros(3))
        e1 = np.array([1.0, 0.0, 0.0, 0.0])
        report = solve_chain(FactorChain(chain.lower_factors, (ident_u,)), e1, keep_intermediates=True)
        np.testing.assert_allclose(report.x, dense_solve(worked_L.to_dense(), e1), rtol=0, atol=1e-14)
        assert report.stages == 3 and len(report.intermediates) == 3
        # X(1) solves L(1) X(1) = e1
        np.testing.assert_allclose(chain.lower_factors[0].to_dense() @ report.intermediates[0], e1)

    def test_random_chain_dense_oracle(self, rng):
        chain = random_chain(100, 3, 2, rng)
        b = rng.standard_normal(100)
        report = solve_chain(chain, b)
        x_ref = dense_solve(multiply_chain(chain), b)
        assert np.abs(report.x - x_ref).max() / np.abs(x_ref).max() <= 1e-10

    def test_intermediates_off_by_default(self, rng):
        assert solve_chain(random_chain(10, 1, 1, rng), np.ones(10)).intermediates is None

    def test_stage_error_tagged(self):
        bad = BidiagonalFactor(3, "upper", np.array([1.0, 0.0, 1.0]), np.ones(2))
        with pytest.raises(SingularUpper) as info:
            solve_chain(FactorChain((BidiagonalFactor.unit_lower(np.ones(2)),), (bad,)), np.ones(3))
        assert info.value.stage == "substitution" and info.value.stage_index == 1

    @settings(max_examples=15, deadline=None)
    @given(n=st.sampled_from([5, 60, 1000, 10_000]), p=st.integers(1, 4), q=st.integers(1, 3), seed=st.integers(0, 10**6))
    def test_recovers_x(self, n, p, q, seed):
        rng = np.random.default_rng(seed)
        chain = random_chain(n, p, q, rng)
        x = rng.standard_normal(n)
        b = multiply_chain(chain).matvec(x)
        assert np.abs(solve_chain(chain, b).x - x).max() <= 1e-10 * max(1.0, np.abs(x).max())


class TestUpperFactor:
    def test_q1_returns_u(self):
        U = UpperBanded(4, 1, [2.0, 3.0, 4.0, 5.0], [[1.0, 2.0, 3.0]])
        (f,) = darboux_factor_upper(U)
        assert f.to_banded() == U.to_banded()

    def test_q2_small(self, rng):
        U = random_upper(4, 2, rng)
        factors = darboux_factor_upper(U)
        assert len(factors) == 2
        assert residual_inf_norm(U.to_banded(), multiply_chain(FactorChain((), factors))) <= 1e-11
        assert all(f.is_unit for f in factors[1:])

    def test_zero_diagonal(self, rng):
        U = random_upper(5, 2, rng)
        diag = U.diagonal.copy()
        diag[2] = 0.0
        with pytest.raises(NotFactorizable):
            darboux_factor_upper(UpperBanded(5, 2, diag, U.superdiagonals))

    def test_zero_outer_band(self, rng):
        U = random_upper(5, 2, rng)
        outer = U.superdiagonals[1].copy()
        outer[0] = 0.0
        with pytest.raises(NotFactorizable):
            darboux_factor_upper(UpperBanded(5, 2, U.diagonal, [U.superdiagonals[0], outer]))

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_transpose_commutes_with_lower_path(self, q, rng):
        n = 30
        U = random_upper(n, q, rng)
        upper = multiply_chain(FactorChain((), darboux_factor_upper(U))).to_dense()
        # lower path: factor W = U^T D^-1 directly, transpose back, put D in front
        u = U.diagonal
        W = UnitLowerBanded.from_banded(BandedMatrix.from_dense(U.to_dense().T / u[None, :], q, 0))
        lower, _, _ = darboux_factor(W)
        via_lower = np.diag(u) @ multiply_chain(lower).to_dense().T
        scale = np.abs(upper).max()
        assert np.abs(upper - via_lower).max() / scale <= 1e-11
        assert np.abs(upper - U.to_dense()).max() / scale <= 1e-11


class TestSolveBanded:
    def test_tridiagonal_dense(self, rng):
        A = dominant(40, 1, 1, 5)
        b = rng.standard_normal(40)
        report = solve_banded(A, b)
        np.testing.assert_allclose(report.x, dense_solve(A, b), rtol=0, atol=1e-12 * np.abs(dense_solve(A, b)).max())
        assert report.stages == 2

    def test_ones(self):
        A = dominant(150, 2, 2, 11)
        x = solve_banded(A, A.matvec(np.ones(150))).x
        assert np.abs(x - 1.0).max() <= 1e-10

    def test_monic_hessenberg(self, rng):
        A = dominant(200, 3, 1, 2, monic=True)
        report = solve_banded(A, rng.standard_normal(200))
        assert report.residual_inf <= 1e-10
        assert report.stages == 4

    def test_identity_with_bands_rejected(self):
        # identity padded with empty outer bands: the chain needs them nonzero
        with pytest.raises(NotFactorizable) as info:
            solve_banded(BandedMatrix.identity(6, 2, 1), np.ones(6))
        assert info.value.stage == "validate"

    def test_pivot_stage_label(self):
        A = BandedMatrix.from_dense([[0.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
        with pytest.raises(PivotBreakdown) as info:
            solve_banded(A, np.ones(3))
        assert info.value.stage == "lu"

    @pytest.mark.parametrize("p, q", [(1, 1), (3, 1), (2, 2), (3, 3)])
    def test_dense_equivalence(self, p, q, rng):
        A = dominant(120, p, q, 100 * p + q)
        b = rng.standard_normal(120)
        x = solve_banded(A, b).x
        x_ref = dense_solve(A, b)
        assert np.abs(x - x_ref).max() / np.abs(x_ref).max() <= 1e-8

    @pytest.mark.parametrize("n, p", [(10, 1), (57, 3), (400, 5)])
    def test_monic_flop_count(self, n, p, rng):
        A = dominant(n, p, 1, n + p, monic=True)
        assert solve_banded(A, rng.standard_normal(n)).flops == 2 * (n - 1) * p + 3 * n - 2

    def test_flops_linear_in_n(self):
        f = [solve_banded(dominant(n, 2, 2, n), np.ones(n)).flops for n in (100, 200, 300)]
        assert f[2] - f[1] == f[1] - f[0]
