"""Slow, deliberately naive reference computations for cross-checking.

Nothing here shares code with the banded main path: dense ``O(n^3)``
Doolittle elimination over the full square, tuple enumeration by
filtering the full Cartesian product, and table lookups by global
subscript.  The dense paths are fine up to a few hundred; tuple sums are
meant for orders of a dozen or so.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .exceptions import DimensionError, PivotBreakdown

__all__ = [
    "TupleSet",
    "dense_lu",
    "dense_solve",
    "enumerate_tuples",
    "brute_force_l_entry",
]


def _as_dense(A):
    if hasattr(A, "to_dense"):
        A = A.to_dense()
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix has non-finite entries")
    return A


def dense_lu(A, rtol=1e-12):
    """Doolittle LU without pivoting on a dense copy of ``A``."""
    A = _as_dense(A)
    n = A.shape[0]
    scale = np.abs(A).max()
    L = np.eye(n)
    U = np.zeros((n, n))
    for i in range(n):
        U[i, i:] = A[i, i:] - L[i, :i] @ U[:i, i:]
        if abs(U[i, i]) <= rtol * scale:
            raise PivotBreakdown(i, U[i, i])
        L[i + 1:, i] = (A[i + 1:, i] - L[i + 1:, :i] @ U[:i, i]) / U[i, i]
    return L, U


def dense_solve(A, b):
    """Solve ``A x = b`` via :func:`dense_lu` and two triangular sweeps."""
    L, U = dense_lu(A)
    b = np.asarray(b, dtype=np.float64)
    n = L.shape[0]
    if b.shape != (n,):
        raise DimensionError(f"right-hand side must have length {n}")
    y = np.zeros(n)
    for i in range(n):
        y[i] = b[i] - L[i, :i] @ y[:i]
    x = np.zeros(n)
    for i in reversed(range(n)):
        x[i] = (y[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


@dataclass(frozen=True)
class TupleSet:
    """Strictly increasing ``k``-tuples from ``1..p``, optionally with a
    forbidden first element."""

    k: int
    p: int
    exclusion: int = None


def enumerate_tuples(tuple_set):
    """All tuples of ``tuple_set`` in lexicographic order."""
    if tuple_set.k < 0 or tuple_set.p < 0:
        raise ValueError("k and p must be nonnegative")
    out = []
    for t in product(range(1, tuple_set.p + 1), repeat=tuple_set.k):
        if any(t[i] >= t[i + 1] for i in range(len(t) - 1)):
            continue
        if tuple_set.exclusion is not None and t and t[0] == tuple_set.exclusion:
            continue
        out.append(t)
    return out


def brute_force_l_entry(table, m, k):
    """``l[m, m-k]`` rebuilt from a filled table as a plain sum of products
    over every increasing ``k``-tuple; entries are fetched by global
    subscript ``(m-j)p + sig_j + m-j+1``."""
    p = table.p
    if k < 1:
        raise DimensionError(f"band k={k} must be positive")
    if k > p:
        return 0.0
    if not k <= m < table.n:
        raise DimensionError(f"row m={m} has no band {k}")
    total = 0.0
    for sig in enumerate_tuples(TupleSet(k, p)):
        term = 1.0
        for j in range(1, k + 1):
            term *= table.gamma((m - j) * p + sig[j - 1] + m - j + 1)
        total += term
    return total
