"""Pivot-free banded LU (Doolittle) and the unit-superdiagonal helpers.

No pivoting is done on purpose: row exchanges would destroy the unit-lower
banded shape of ``L`` that the bidiagonal chain factorization relies on.
"""

import numpy as np

from .band_core import BandedMatrix, UnitLowerBanded, UpperBanded
from .exceptions import DimensionError, NotMonic, NotNormalizable, PivotBreakdown

__all__ = [
    "PIVOT_RTOL",
    "lu_banded",
    "lu_hessenberg_monic",
    "normalize_superdiagonal",
]

PIVOT_RTOL = 1e-12


def _check_bandwidths(A):
    if not isinstance(A, BandedMatrix):
        raise TypeError(f"expected BandedMatrix, got {type(A).__name__}")
    if A.lower_bw < 1 or A.upper_bw < 1:
        raise DimensionError(
            f"LU needs lower and upper bandwidth >= 1, got ({A.lower_bw}, {A.upper_bw})"
        )


def _lu_kernel(A):
    """Band Doolittle elimination.

    Returns ``(L, U, flops)``.  Works row-aligned on Python lists: the
    recurrence is sequential, so per-entry numpy calls would only add
    overhead.
    """
    n, p, q = A.n, A.lower_bw, A.upper_bw
    W = A.row_aligned().tolist()
    tol = PIVOT_RTOL * A.max_abs()
    flops = 0
    for k in range(n):
        rowk = W[k]
        pivot = rowk[p]
        if abs(pivot) <= tol:
            raise PivotBreakdown(k, pivot)
        jmax = min(k + q, n - 1)
        for i in range(k + 1, min(k + p, n - 1) + 1):
            rowi = W[i]
            l = rowi[k - i + p] / pivot
            rowi[k - i + p] = l
            flops += 1
            for j in range(k + 1, jmax + 1):
                rowi[j - i + p] -= l * rowk[j - k + p]
            flops += 2 * (jmax - k)
    R = np.array(W)
    L = UnitLowerBanded(
        n, p, [R[d:, p - d] for d in range(1, p + 1)]
    )
    U = UpperBanded(
        n, q, R[:, p], [R[:n - d, p + d] for d in range(1, q + 1)]
    )
    return L, U, flops


def lu_banded(A):
    """Factor ``A = L U`` without pivoting.

    ``L`` is unit lower triangular with ``A.lower_bw`` subdiagonals and ``U``
    upper triangular with ``A.upper_bw`` superdiagonals.  A pivot with
    ``|u_k| <= 1e-12 * max|a_ij|`` raises :class:`PivotBreakdown`.
    """
    _check_bandwidths(A)
    L, U, _ = _lu_kernel(A)
    return L, U


def lu_hessenberg_monic(A):
    """LU of a Hessenberg matrix whose superdiagonal is all ones.

    In that case ``U`` is bidiagonal with unit superdiagonal, so only its
    diagonal ``u_1 .. u_N`` carries information.
    """
    _check_bandwidths(A)
    if A.upper_bw != 1:
        raise DimensionError(f"Hessenberg input must have upper_bw = 1, got {A.upper_bw}")
    sup = A.band(1)
    bad = np.flatnonzero(sup != 1.0)
    if bad.size:
        raise NotMonic(int(bad[0]), float(sup[bad[0]]))
    L, U, _ = _lu_kernel(A)
    return L, U


def normalize_superdiagonal(A):
    """Rescale columns so every superdiagonal entry becomes 1.

    Returns ``(A', d)`` with ``A' = A @ diag(d)``, ``d[0] = 1`` and
    ``d[i+1] = 1 / a[i, i+1]``.  If ``A' y = b`` then ``x = d * y`` solves
    ``A x = b``.
    """
    if not isinstance(A, BandedMatrix):
        raise TypeError(f"expected BandedMatrix, got {type(A).__name__}")
    if A.upper_bw != 1:
        raise DimensionError(f"normalization needs upper_bw = 1, got {A.upper_bw}")
    sup = A.band(1)
    zero = np.flatnonzero(sup == 0.0)
    if zero.size:
        raise NotNormalizable(int(zero[0]))
    d = np.ones(A.n)
    d[1:] = 1.0 / sup
    bands = []
    for off, b in zip(A.offsets, A.bands):
        # element k of band off lives in column k + off (off >= 0) or k (off < 0)
        cols = d[off:] if off >= 0 else d[:A.n + off]
        bands.append(b * cols)
    # make the unit entries exact rather than a * (1/a)
    bands[-1] = np.ones(A.n - 1)
    return BandedMatrix(A.n, A.lower_bw, 1, bands), d
