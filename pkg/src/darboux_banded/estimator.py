"""scikit-learn style front end: ``fit`` factors a matrix, ``solve`` reuses it."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_banded, check_free_params, check_rhs
from .band_core import multiply_chain, residual_inf_norm
from .chain_solver import factor_banded, solve_chain


class DarbouxSolver(BaseEstimator):
    """Direct solver for banded systems via bidiagonal factor chains.

    Parameters
    ----------
    free_params : sequence of float or FreeParameters, optional
        The ``p(p-1)/2`` free entries of the lower chain; all ones if None.
    upper_free_params : sequence of float or FreeParameters, optional
        The ``q(q-1)/2`` free entries of the upper chain; all ones if None.
    keep_intermediates : bool, default False
        Keep the stage vectors in :meth:`solve_report` results.

    Attributes
    ----------
    chain_ : FactorChain
    L_, U_ : UnitLowerBanded, UpperBanded
        The LU factors the chain was built from.
    gamma_table_ : GammaTable
    op_count_ : OpCountReport
        Predicted and measured operation counts of the lower factorization.
    factorization_flops_ : int
    n_, p_, q_ : int
    """

    def __init__(self, free_params=None, upper_free_params=None, keep_intermediates=False):
        self.free_params = free_params
        self.upper_free_params = upper_free_params
        self.keep_intermediates = keep_intermediates

    def fit(self, A, y=None):
        A = check_banded(A)
        lower = check_free_params(self.free_params, A.lower_bw) if A.lower_bw else None
        upper = check_free_params(self.upper_free_params, A.upper_bw) if A.upper_bw else None
        chain, info = factor_banded(A, lower, upper)
        self.A_ = A
        self.chain_ = chain
        self.L_ = info["L"]
        self.U_ = info["U"]
        self.gamma_table_ = info["gamma_table"]
        self.op_count_ = info["lower_op_report"]
        self.upper_op_count_ = info["upper_op_report"]
        self.factorization_flops_ = info["factorization_flops"]
        self.n_, self.p_, self.q_ = A.n, A.lower_bw, A.upper_bw
        return self

    def solve_report(self, b):
        check_is_fitted(self, "chain_")
        b = check_rhs(b, self.n_)
        if b.ndim != 1:
            raise ValueError("solve_report takes a single right-hand side")
        return solve_chain(self.chain_, b, keep_intermediates=self.keep_intermediates, A=self.A_)

    def solve(self, b):
        """Solution of ``A x = b``; ``b`` may hold several columns."""
        check_is_fitted(self, "chain_")
        b = check_rhs(b, self.n_)
        if b.ndim == 1:
            return self.solve_report(b).x
        return np.column_stack([self.solve_report(col).x for col in b.T])

    def fit_solve(self, A, b):
        return self.fit(A).solve(b)

    def reconstruction_error(self):
        """Relative inf-norm distance between the chain product and ``A``."""
        check_is_fitted(self, "chain_")
        return residual_inf_norm(self.A_, multiply_chain(self.chain_))
