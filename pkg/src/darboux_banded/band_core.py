"""Banded matrix containers and the operations shared by the other modules.

Storage convention: diagonal ``d`` (``d = j - i``, negative below the main
diagonal) is a 1-D array of length ``n - |d|`` whose ``k``-th element is the
entry at ``(k, k + d)`` for ``d >= 0`` and at ``(k - d, k)`` for ``d < 0``;
in both cases ``k = min(i, j)``.

All containers are read-only once built.  Indices are 0-based throughout.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError

__all__ = [
    "BandedMatrix",
    "UnitLowerBanded",
    "UpperBanded",
    "BidiagonalFactor",
    "FactorChain",
    "band_get",
    "multiply_chain",
    "residual_inf_norm",
    "inf_norm",
]


def _frozen(values, length, what):
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if arr.shape[0] != length:
        raise DimensionError(f"{what}: expected {length} entries, got {arr.shape[0]}")
    arr.flags.writeable = False
    return arr


def _check_index(n, i, j):
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"index ({i}, {j}) out of range for order {n}")


class BandedMatrix:
    """Square matrix of order ``n`` with ``lower_bw`` sub- and ``upper_bw``
    superdiagonals, stored diagonal by diagonal."""

    __slots__ = ("n", "lower_bw", "upper_bw", "_bands")

    def __init__(self, n, lower_bw, upper_bw, bands):
        n, lower_bw, upper_bw = int(n), int(lower_bw), int(upper_bw)
        if n < 1:
            raise DimensionError(f"order must be positive, got {n}")
        if lower_bw < 0 or upper_bw < 0:
            raise DimensionError("bandwidths must be nonnegative")
        if lower_bw >= n or upper_bw >= n:
            raise DimensionError(
                f"bandwidths ({lower_bw}, {upper_bw}) must be smaller than the order {n}"
            )
        bands = list(bands)
        if len(bands) != lower_bw + upper_bw + 1:
            raise DimensionError(
                f"expected {lower_bw + upper_bw + 1} bands, got {len(bands)}"
            )
        self.n = n
        self.lower_bw = lower_bw
        self.upper_bw = upper_bw
        self._bands = tuple(
            _frozen(b, n - abs(d), f"band {d}")
            for d, b in zip(range(-lower_bw, upper_bw + 1), bands)
        )

    # construction -----------------------------------------------------

    @classmethod
    def from_dense(cls, M, lower_bw=None, upper_bw=None):
        """Build from a dense square array.

        Bandwidths not given are inferred from the nonzero pattern.  Entries
        outside the requested band must be zero.
        """
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {M.shape}")
        n = M.shape[0]
        rows, cols = np.nonzero(M)
        offsets = cols - rows
        if lower_bw is None:
            lower_bw = int(max(0, -offsets.min())) if offsets.size else 0
        if upper_bw is None:
            upper_bw = int(max(0, offsets.max())) if offsets.size else 0
        if offsets.size and (offsets.min() < -lower_bw or offsets.max() > upper_bw):
            raise DimensionError("matrix has nonzeros outside the requested band")
        bands = [np.diagonal(M, d) for d in range(-lower_bw, upper_bw + 1)]
        return cls(n, lower_bw, upper_bw, bands)

    @classmethod
    def from_row_aligned(cls, R, lower_bw, upper_bw):
        """Inverse of :meth:`row_aligned`."""
        R = np.asarray(R, dtype=np.float64)
        n = R.shape[0]
        bands = []
        for c, d in enumerate(range(-lower_bw, upper_bw + 1)):
            bands.append(R[:n - d, c] if d >= 0 else R[-d:, c])
        return cls(n, lower_bw, upper_bw, bands)

    @classmethod
    def identity(cls, n, lower_bw=0, upper_bw=0):
        bands = [np.zeros(n - abs(d)) for d in range(-lower_bw, upper_bw + 1)]
        bands[lower_bw] = np.ones(n)
        return cls(n, lower_bw, upper_bw, bands)

    # access -----------------------------------------------------------

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def offsets(self):
        return range(-self.lower_bw, self.upper_bw + 1)

    def band(self, d):
        if not -self.lower_bw <= d <= self.upper_bw:
            raise DimensionError(f"offset {d} outside band [-{self.lower_bw}, {self.upper_bw}]")
        return self._bands[d + self.lower_bw]

    @property
    def bands(self):
        return self._bands

    def get(self, i, j):
        _check_index(self.n, i, j)
        d = j - i
        if -self.lower_bw <= d <= self.upper_bw:
            return float(self._bands[d + self.lower_bw][min(i, j)])
        return 0.0

    def replace_entry(self, i, j, value):
        """Return a copy with the in-band entry ``(i, j)`` set to ``value``."""
        _check_index(self.n, i, j)
        d = j - i
        if not -self.lower_bw <= d <= self.upper_bw:
            raise DimensionError(f"entry ({i}, {j}) lies outside the band")
        bands = [b.copy() for b in self._bands]
        bands[d + self.lower_bw][min(i, j)] = value
        return BandedMatrix(self.n, self.lower_bw, self.upper_bw, bands)

    def row_aligned(self):
        """Return ``R`` of shape ``(n, p + q + 1)`` with ``R[i, d + p] = A[i, i + d]``
        (zero where ``i + d`` falls outside the matrix)."""
        n = self.n
        R = np.zeros((n, self.lower_bw + self.upper_bw + 1))
        for c, (d, b) in enumerate(zip(self.offsets, self._bands)):
            if d >= 0:
                R[:n - d, c] = b
            else:
                R[-d:, c] = b
        return R

    def to_dense(self):
        M = np.zeros((self.n, self.n))
        for d, b in zip(self.offsets, self._bands):
            k = np.arange(b.shape[0])
            if d >= 0:
                M[k, k + d] = b
            else:
                M[k - d, k] = b
        return M

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise DimensionError(f"vector of length {self.n} expected, got shape {x.shape}")
        y = np.zeros(self.n)
        for d, b in zip(self.offsets, self._bands):
            if d >= 0:
                y[:self.n - d] += b * x[d:]
            else:
                y[-d:] += b * x[:self.n + d]
        return y

    def __matmul__(self, other):
        if isinstance(other, BandedMatrix):
            return _banded_matmul(self, other)
        return self.matvec(other)

    def transpose(self):
        return BandedMatrix(self.n, self.upper_bw, self.lower_bw, self._bands[::-1])

    @property
    def T(self):
        return self.transpose()

    def max_abs(self):
        return max((float(np.abs(b).max()) for b in self._bands if b.size), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, BandedMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.lower_bw == other.lower_bw
            and self.upper_bw == other.upper_bw
            and all(np.array_equal(a, b) for a, b in zip(self._bands, other._bands))
        )

    __hash__ = None

    def __repr__(self):
        return f"BandedMatrix(n={self.n}, lower_bw={self.lower_bw}, upper_bw={self.upper_bw})"


def _banded_matmul(A, B):
    if A.n != B.n:
        raise DimensionError(f"order mismatch: {A.n} vs {B.n}")
    n = A.n
    pa, qa, pb, qb = A.lower_bw, A.upper_bw, B.lower_bw, B.upper_bw
    p, q = min(pa + pb, n - 1), min(qa + qb, n - 1)
    Ra, Rb = A.row_aligned(), B.row_aligned()
    nb = pb + qb + 1
    C = np.zeros((n, pa + qa + pb + qb + 1))
    # C[i, i+t+e] += A[i, i+t] * B[i+t, i+t+e]
    for ti, t in enumerate(range(-pa, qa + 1)):
        shifted = np.zeros_like(Rb)
        if t >= 0:
            shifted[:n - t] = Rb[t:]
        else:
            shifted[-t:] = Rb[:n + t]
        C[:, ti:ti + nb] += Ra[:, ti, None] * shifted
    lo = (pa + pb) - p
    C = C[:, lo:lo + p + q + 1]
    return BandedMatrix.from_row_aligned(C, p, q)


class UnitLowerBanded:
    """Unit lower triangular matrix with ``p`` subdiagonals.

    ``subdiagonals[d - 1]`` holds diagonal ``-d`` (length ``n - d``); the unit
    diagonal is implicit.
    """

    __slots__ = ("n", "p", "subdiagonals", "_lists")

    def __init__(self, n, p, subdiagonals):
        n, p = int(n), int(p)
        if n < 1 or p < 1 or p >= n:
            raise DimensionError(f"need 1 <= p < n, got n={n}, p={p}")
        subdiagonals = list(subdiagonals)
        if len(subdiagonals) != p:
            raise DimensionError(f"expected {p} subdiagonals, got {len(subdiagonals)}")
        self.n = n
        self.p = p
        self.subdiagonals = tuple(
            _frozen(b, n - d, f"subdiagonal {d}") for d, b in enumerate(subdiagonals, 1)
        )
        self._lists = None

    @classmethod
    def from_banded(cls, A):
        if A.upper_bw != 0 or not np.all(A.band(0) == 1.0):
            raise DimensionError("matrix is not unit lower triangular")
        return cls(A.n, A.lower_bw, [A.band(-d) for d in range(1, A.lower_bw + 1)])

    def get(self, i, j):
        _check_index(self.n, i, j)
        d = i - j
        if d == 0:
            return 1.0
        if 1 <= d <= self.p:
            return float(self.subdiagonals[d - 1][j])
        return 0.0

    def band_lists(self):
        """Subdiagonals as plain Python lists (cached); used by scalar kernels."""
        if self._lists is None:
            self._lists = tuple(b.tolist() for b in self.subdiagonals)
        return self._lists

    def max_abs_subdiagonal(self):
        return max(float(np.abs(b).max()) for b in self.subdiagonals)

    def outer_band_nonzero(self, tol=0.0):
        return bool(np.all(np.abs(self.subdiagonals[-1]) > tol))

    def to_banded(self):
        bands = [self.subdiagonals[d - 1] for d in range(self.p, 0, -1)]
        return BandedMatrix(self.n, self.p, 0, bands + [np.ones(self.n)])

    def to_dense(self):
        return self.to_banded().to_dense()

    def __repr__(self):
        return f"UnitLowerBanded(n={self.n}, p={self.p})"


class UpperBanded:
    """Upper triangular matrix with nonunit diagonal and ``q`` superdiagonals."""

    __slots__ = ("n", "q", "diagonal", "superdiagonals")

    def __init__(self, n, q, diagonal, superdiagonals):
        n, q = int(n), int(q)
        if n < 1 or q < 1 or q >= n:
            raise DimensionError(f"need 1 <= q < n, got n={n}, q={q}")
        superdiagonals = list(superdiagonals)
        if len(superdiagonals) != q:
            raise DimensionError(f"expected {q} superdiagonals, got {len(superdiagonals)}")
        self.n = n
        self.q = q
        self.diagonal = _frozen(diagonal, n, "diagonal")
        self.superdiagonals = tuple(
            _frozen(b, n - d, f"superdiagonal {d}") for d, b in enumerate(superdiagonals, 1)
        )

    @classmethod
    def from_banded(cls, A):
        if A.lower_bw != 0:
            raise DimensionError("matrix is not upper triangular")
        return cls(A.n, A.upper_bw, A.band(0), [A.band(d) for d in range(1, A.upper_bw + 1)])

    @property
    def is_monic(self):
        """True for the Hessenberg shape: one superdiagonal, all ones."""
        return self.q == 1 and bool(np.all(self.superdiagonals[0] == 1.0))

    def get(self, i, j):
        _check_index(self.n, i, j)
        d = j - i
        if d == 0:
            return float(self.diagonal[i])
        if 1 <= d <= self.q:
            return float(self.superdiagonals[d - 1][i])
        return 0.0

    def to_banded(self):
        return BandedMatrix(self.n, 0, self.q, [self.diagonal, *self.superdiagonals])

    def to_dense(self):
        return self.to_banded().to_dense()

    def as_factor(self):
        """The ``q = 1`` case viewed as a single upper bidiagonal factor."""
        if self.q != 1:
            raise DimensionError("only a bidiagonal upper matrix is a single factor")
        return BidiagonalFactor(self.n, "upper", self.diagonal, self.superdiagonals[0])

    def __repr__(self):
        return f"UpperBanded(n={self.n}, q={self.q}, monic={self.is_monic})"


class BidiagonalFactor:
    """Lower or upper bidiagonal matrix; ``offdiag[k]`` sits at ``(k+1, k)``
    for a lower factor and at ``(k, k+1)`` for an upper one."""

    __slots__ = ("n", "orientation", "diag", "offdiag")

    def __init__(self, n, orientation, diag, offdiag):
        n = int(n)
        if n < 2:
            raise DimensionError("a bidiagonal factor needs order >= 2")
        if orientation not in ("lower", "upper"):
            raise ValueError(f"orientation must be 'lower' or 'upper', got {orientation!r}")
        self.n = n
        self.orientation = orientation
        self.diag = _frozen(np.ones(n) if diag is None else diag, n, "diag")
        self.offdiag = _frozen(offdiag, n - 1, "offdiag")

    @classmethod
    def unit_lower(cls, offdiag):
        offdiag = np.asarray(offdiag, dtype=np.float64)
        return cls(offdiag.shape[0] + 1, "lower", None, offdiag)

    @property
    def is_unit(self):
        return bool(np.all(self.diag == 1.0))

    def get(self, i, j):
        _check_index(self.n, i, j)
        if i == j:
            return float(self.diag[i])
        if self.orientation == "lower" and i == j + 1:
            return float(self.offdiag[j])
        if self.orientation == "upper" and j == i + 1:
            return float(self.offdiag[i])
        return 0.0

    def to_banded(self):
        if self.orientation == "lower":
            return BandedMatrix(self.n, 1, 0, [self.offdiag, self.diag])
        return BandedMatrix(self.n, 0, 1, [self.diag, self.offdiag])

    def to_dense(self):
        return self.to_banded().to_dense()

    def transpose(self):
        other = "upper" if self.orientation == "lower" else "lower"
        return BidiagonalFactor(self.n, other, self.diag, self.offdiag)

    def __repr__(self):
        return f"BidiagonalFactor(n={self.n}, orientation={self.orientation!r})"


@dataclass(frozen=True)
class FactorChain:
    """Ordered factors ``L(1) ... L(p) U(1) ... U(q)``."""

    lower_factors: tuple = ()
    upper_factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lower_factors", tuple(self.lower_factors))
        object.__setattr__(self, "upper_factors", tuple(self.upper_factors))
        for f in self.lower_factors:
            if f.orientation != "lower":
                raise DimensionError("lower_factors must all be lower bidiagonal")
        for f in self.upper_factors:
            if f.orientation != "upper":
                raise DimensionError("upper_factors must all be upper bidiagonal")

    @property
    def factors(self):
        return self.lower_factors + self.upper_factors

    @property
    def n(self):
        if not self.factors:
            raise DimensionError("empty factor chain has no order")
        return self.factors[0].n

    def __len__(self):
        return len(self.factors)


def band_get(A, i, j):
    """Entry ``(i, j)`` of any banded container; zero outside the band."""
    return A.get(i, j)


def multiply_chain(chain):
    """Ordered product of all factors as a ``BandedMatrix`` with
    ``lower_bw = len(lower_factors)`` and ``upper_bw = len(upper_factors)``."""
    factors = chain.factors
    if not factors:
        raise DimensionError("cannot multiply an empty chain")
    n = factors[0].n
    for f in factors:
        if f.n != n:
            raise DimensionError(f"factor orders differ: {f.n} vs {n}")
    product = factors[0].to_banded()
    for f in factors[1:]:
        product = _banded_matmul(product, f.to_banded())
    p = min(len(chain.lower_factors), n - 1)
    q = min(len(chain.upper_factors), n - 1)
    if (product.lower_bw, product.upper_bw) != (p, q):
        product = _rebandwidth(product, p, q)
    return product


def _rebandwidth(A, p, q):
    if A.lower_bw > p or A.upper_bw > q:
        R = A.row_aligned()
        drop_lo = A.lower_bw - p if A.lower_bw > p else 0
        drop_hi = A.upper_bw - q if A.upper_bw > q else 0
        if np.any(R[:, :drop_lo]) or (drop_hi and np.any(R[:, R.shape[1] - drop_hi:])):
            raise DimensionError("matrix has nonzeros outside the requested band")
    return BandedMatrix.from_row_aligned(_padded(A, p, q), p, q)


def _padded(A, p, q):
    """Row-aligned array of ``A`` widened (or narrowed) to bandwidths ``(p, q)``."""
    R = A.row_aligned()
    out = np.zeros((A.n, p + q + 1))
    for c, d in enumerate(A.offsets):
        if -p <= d <= q:
            out[:, d + p] = R[:, c]
    return out


def inf_norm(A):
    """Maximum absolute row sum."""
    return float(np.abs(A.row_aligned()).sum(axis=1).max())


def residual_inf_norm(A, B):
    """``||A - B||_inf / ||A||_inf``.  Bandwidths are padded to their union."""
    if A.n != B.n:
        raise DimensionError(f"order mismatch: {A.n} vs {B.n}")
    p = max(A.lower_bw, B.lower_bw)
    q = max(A.upper_bw, B.upper_bw)
    Ra, Rb = _padded(A, p, q), _padded(B, p, q)
    denom = float(np.abs(Ra).sum(axis=1).max())
    if denom == 0.0:
        raise ZeroDivisionError("reference matrix has zero norm")
    return float(np.abs(Ra - Rb).sum(axis=1).max()) / denom
