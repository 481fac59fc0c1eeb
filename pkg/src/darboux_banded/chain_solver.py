"""Solving banded systems through a chain of bidiagonal factors.

With ``A = L(1) ... L(p) U(1) ... U(q)`` the system ``A x = b`` reduces to
``p`` unit forward substitutions followed by ``q`` back substitutions, each
costing ``O(n)``.
"""

from dataclasses import dataclass

import numpy as np

from .band_core import (
    BandedMatrix,
    BidiagonalFactor,
    FactorChain,
    UnitLowerBanded,
    UpperBanded,
    inf_norm,
    multiply_chain,
)
from .banded_lu import PIVOT_RTOL, _check_bandwidths, _lu_kernel
from .darboux import darboux_factor
from .exceptions import BandedError, DimensionError, NotFactorizable, SingularUpper

__all__ = [
    "SolveReport",
    "solve_unit_lower_bidiagonal",
    "solve_upper_bidiagonal",
    "solve_chain",
    "darboux_factor_upper",
    "solve_banded",
    "relative_residual",
]


@dataclass(frozen=True, eq=False)
class SolveReport:
    x: np.ndarray
    residual_inf: float
    flops: int
    stages: int
    intermediates: tuple = None
    factorization_flops: int = 0
    lower_op_report: object = None
    upper_op_report: object = None


def _as_vector(b, n):
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.shape[0] != n:
        raise DimensionError(f"vector of length {n} expected, got shape {b.shape}")
    return b


def _forward_unit(offdiag, b):
    """Unit lower bidiagonal solve on lists; returns ``(x, flops)``."""
    x = list(b)
    prev = x[0]
    flops = 0
    for i in range(1, len(x)):
        prev = x[i] - offdiag[i - 1] * prev
        x[i] = prev
        flops += 2
    return x, flops


def _backward_unit(offdiag, b):
    x = list(b)
    nxt = x[-1]
    flops = 0
    for i in range(len(x) - 2, -1, -1):
        nxt = x[i] - offdiag[i] * nxt
        x[i] = nxt
        flops += 2
    return x, flops


def _backward(diag, offdiag, b):
    x = list(b)
    n = len(x)
    nxt = x[n - 1] / diag[n - 1]
    x[n - 1] = nxt
    flops = 1
    for i in range(n - 2, -1, -1):
        nxt = (x[i] - offdiag[i] * nxt) / diag[i]
        x[i] = nxt
        flops += 3
    return x, flops


def _check_upper_diag(diag, offdiag):
    scale = max(float(np.abs(diag).max()), float(np.abs(offdiag).max()) if offdiag.size else 0.0)
    small = np.flatnonzero(np.abs(diag) <= PIVOT_RTOL * scale)
    if small.size:
        i = int(small[0])
        raise SingularUpper(i, float(diag[i]))


def _solve_factor(f, x):
    """Apply one factor's inverse to list ``x``; returns ``(x, flops)``."""
    if f.orientation == "lower":
        if not f.is_unit:
            raise DimensionError("lower chain factors must be unit diagonal")
        return _forward_unit(f.offdiag.tolist(), x)
    if f.is_unit:
        return _backward_unit(f.offdiag.tolist(), x)
    _check_upper_diag(f.diag, f.offdiag)
    return _backward(f.diag.tolist(), f.offdiag.tolist(), x)


def solve_unit_lower_bidiagonal(f, b):
    """Forward substitution ``x_0 = b_0``, ``x_i = b_i - g_i x_{i-1}``."""
    if not isinstance(f, BidiagonalFactor) or f.orientation != "lower" or not f.is_unit:
        raise DimensionError("expected a unit lower bidiagonal factor")
    b = _as_vector(b, f.n)
    x, _ = _forward_unit(f.offdiag.tolist(), b.tolist())
    return np.array(x)


def solve_upper_bidiagonal(U, b):
    """Back substitution with a bidiagonal upper matrix.

    ``U`` may be an ``UpperBanded`` with ``q = 1`` or an upper
    ``BidiagonalFactor``.
    """
    if isinstance(U, UpperBanded):
        U = U.as_factor()
    if not isinstance(U, BidiagonalFactor) or U.orientation != "upper":
        raise DimensionError("expected an upper bidiagonal matrix")
    b = _as_vector(b, U.n)
    _check_upper_diag(U.diag, U.offdiag)
    x, _ = _backward(U.diag.tolist(), U.offdiag.tolist(), b.tolist())
    return np.array(x)


def relative_residual(A, x, b):
    """``||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)``."""
    r = A.matvec(x) - b
    denom = inf_norm(A) * float(np.abs(x).max()) + float(np.abs(b).max())
    if denom == 0.0:
        return 0.0
    return float(np.abs(r).max()) / denom


def solve_chain(chain, b, keep_intermediates=False, A=None):
    """Solve ``(L(1) ... L(p) U(1) ... U(q)) x = b`` stage by stage.

    Stage ``k`` solves ``L(k) X(k) = X(k-1)`` (with ``X(0) = b``), then the
    upper factors are peeled off left to right by back substitution.  The
    residual is measured against ``A`` when given, else against the chain
    product.
    """
    if not isinstance(chain, FactorChain) or not chain.factors:
        raise DimensionError("expected a nonempty FactorChain")
    n = chain.n
    b = _as_vector(b, n)
    x = b.tolist()
    flops = 0
    kept = []
    for idx, f in enumerate(chain.factors):
        if f.n != n:
            raise DimensionError(f"factor {idx} has order {f.n}, expected {n}")
        try:
            x, fl = _solve_factor(f, x)
        except BandedError as exc:
            exc.stage = "substitution"
            exc.stage_index = idx
            raise
        flops += fl
        if keep_intermediates:
            kept.append(np.array(x))
    x = np.array(x)
    if A is None:
        A = multiply_chain(chain)
    return SolveReport(
        x=x,
        residual_inf=relative_residual(A, x, b),
        flops=flops,
        stages=len(chain.factors),
        intermediates=tuple(kept) if keep_intermediates else None,
    )


def _factor_upper(U, params=None):
    """Returns ``(factors, op_report, flops)`` for :func:`darboux_factor_upper`."""
    if not isinstance(U, UpperBanded):
        raise TypeError(f"expected UpperBanded, got {type(U).__name__}")
    n, q = U.n, U.q
    u = U.diagonal
    tol = PIVOT_RTOL * max(float(np.abs(u).max()), max(float(np.abs(s).max()) for s in U.superdiagonals))
    small = np.flatnonzero(np.abs(u) <= tol)
    if small.size:
        i = int(small[0])
        raise NotFactorizable(f"diagonal entry u[{i}] is zero", index=i)
    if q == 1:
        return (U.as_factor(),), None, 0
    outer = U.superdiagonals[-1]
    small = np.flatnonzero(np.abs(outer) <= tol)
    if small.size:
        i = int(small[0])
        raise NotFactorizable(f"outermost superdiagonal entry u[{i},{i + q}] is zero", index=i)

    # W = U^T diag(u)^-1 is unit lower with q subdiagonals
    W = UnitLowerBanded(n, q, [sup / u[:n - d] for d, sup in enumerate(U.superdiagonals, 1)])
    flops = sum(n - d for d in range(1, q + 1))
    lower, _, report = darboux_factor(W, params)
    w = [f.offdiag for f in lower.lower_factors]
    first = BidiagonalFactor(n, "upper", u, u[:n - 1] * w[q - 1])
    flops += n - 1
    rest = [BidiagonalFactor(n, "upper", None, w[q - j]) for j in range(2, q + 1)]
    return (first, *rest), report, flops + report.measured_flops


def darboux_factor_upper(U, params=None):
    """Split ``U`` (``q`` superdiagonals) into ``q`` upper bidiagonal factors.

    The transpose trick: ``W = U^T D^-1`` with ``D = diag(u)`` is unit lower,
    so ``W = W(1) ... W(q)`` and ``U = D W(q)^T ... W(1)^T``.  The diagonal
    ``D`` is folded into the first returned factor; the others are unit.
    """
    factors, _, _ = _factor_upper(U, params)
    return factors


def _outer_band_check(A):
    tol = PIVOT_RTOL * A.max_abs()
    if A.lower_bw >= 2:
        small = np.flatnonzero(np.abs(A.band(-A.lower_bw)) <= tol)
        if small.size:
            i = int(small[0])
            raise NotFactorizable(
                f"outermost subdiagonal entry a[{i + A.lower_bw},{i}] is zero", index=i
            )
    if A.upper_bw >= 2:
        small = np.flatnonzero(np.abs(A.band(A.upper_bw)) <= tol)
        if small.size:
            i = int(small[0])
            raise NotFactorizable(
                f"outermost superdiagonal entry a[{i},{i + A.upper_bw}] is zero", index=i
            )


def factor_banded(A, params_lower=None, params_upper=None):
    """LU followed by both chain factorizations.

    Returns ``(chain, info)``; ``info`` carries the op-count reports and the
    factorization flop total.  Errors are tagged with the failing stage.
    """
    _check_bandwidths(A)
    stage = "validate"
    try:
        _outer_band_check(A)
        stage = "lu"
        L, U, lu_flops = _lu_kernel(A)
        stage = "darboux_lower"
        lower, table, lower_report = darboux_factor(L, params_lower)
        stage = "darboux_upper"
        upper, upper_report, upper_flops = _factor_upper(U, params_upper)
    except BandedError as exc:
        exc.stage = stage
        raise
    chain = FactorChain(lower.lower_factors, upper)
    info = {
        "L": L,
        "U": U,
        "gamma_table": table,
        "lower_op_report": lower_report,
        "upper_op_report": upper_report,
        "lu_flops": lu_flops,
        "factorization_flops": lu_flops + lower_report.measured_flops + upper_flops,
    }
    return chain, info


def solve_banded(A, b, params_lower=None, params_upper=None, keep_intermediates=False):
    """Solve ``A x = b``: LU, chain factorization of both triangles, then
    ``p + q`` bidiagonal substitutions."""
    if not isinstance(A, BandedMatrix):
        raise TypeError(f"expected BandedMatrix, got {type(A).__name__}")
    b = _as_vector(b, A.n)
    chain, info = factor_banded(A, params_lower, params_upper)
    report = solve_chain(chain, b, keep_intermediates=keep_intermediates, A=A)
    return SolveReport(
        x=report.x,
        residual_inf=report.residual_inf,
        flops=report.flops,
        stages=report.stages,
        intermediates=report.intermediates,
        factorization_flops=info["factorization_flops"],
        lower_op_report=info["lower_op_report"],
        upper_op_report=info["upper_op_report"],
    )
