"""Bidiagonal (Darboux) factorization of a unit lower banded matrix.

A unit lower matrix ``L`` with ``p`` subdiagonals is written as the ordered
product ``L(1) L(2) ... L(p)`` of unit lower bidiagonal factors.  The
subdiagonal entries of all factors are kept in a table with one row per
matrix row ``m = 1 .. n-1`` and one column per factor::

    column:   0      1        2      ...   p
    row 1:  g_1    g_2      g_3      ...  g_{p+1}
    row 2:  g_{p+2} g_{p+3}  ...           g_{2p+2}

so row ``m``, column ``c`` holds ``g_{m(p+1) - p + c}``.  Column ``c >= 1``
is the subdiagonal of factor ``L(c)``; column 0 is reserved for the diagonal
of ``U`` when a caller attaches one.

Comparing row ``m`` of ``L(1)...L(p)`` with row ``m`` of ``L`` gives, for
each band ``k = 1..p``::

    l[m, m-k] = sum over 1 <= sig_1 < ... < sig_k <= p of
                prod_{j=1..k} table[m-j+1, sig_j]

The only term containing ``table[m, p-k+1]`` is the one with
``sig = (p-k+1, ..., p)``, and every other term only touches earlier
columns of row ``m`` or earlier rows.  Solving for that entry row by row,
left to right, is the recurrence implemented by :func:`darboux_step`.  In
rows ``m < p`` the bands ``k > m`` do not exist; the matching entries
(row ``m``, columns ``1 .. p-m``) are free and must be supplied by the
caller as :class:`FreeParameters`.

Indices ``m`` and ``s`` here follow the 1-based loop convention of the
recurrence: step ``(m, s)`` produces ``g_{mp+s}``, which lives in column
``p + s - m`` and uses band ``k = m - s + 1`` of ``L``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, fsum, isfinite, prod
from operator import getitem

import numpy as np

from .band_core import BidiagonalFactor, FactorChain, UnitLowerBanded
from .exceptions import (
    DarbouxBreakdown,
    DimensionError,
    InvalidFreeParameter,
    NotFactorizable,
    SequencingError,
)

__all__ = [
    "BREAKDOWN_RTOL",
    "FreeParameters",
    "GammaTable",
    "OpCountReport",
    "init_gamma_table",
    "darboux_step",
    "darboux_factor",
    "predicted_op_count",
    "step_sequence",
]

BREAKDOWN_RTOL = 1e-12

_UNSET = float("nan")


@dataclass(frozen=True)
class FreeParameters:
    """The ``p(p-1)/2`` freely chosen entries, row-major: row 1 first
    (``p-1`` values), then row 2 (``p-2`` values), and so on."""

    p: int
    values: tuple = ()

    def __post_init__(self):
        if self.p < 1:
            raise DimensionError(f"p must be >= 1, got {self.p}")
        values = tuple(float(v) for v in self.values)
        expected = self.p * (self.p - 1) // 2
        if len(values) != expected:
            raise DimensionError(
                f"p={self.p} needs {expected} free parameters, got {len(values)}"
            )
        for pos, v in enumerate(values):
            if v == 0.0 or not isfinite(v):
                raise InvalidFreeParameter(pos, v)
        object.__setattr__(self, "values", values)

    @classmethod
    def ones(cls, p):
        return cls(p, (1.0,) * (p * (p - 1) // 2))

    @classmethod
    def random(cls, p, rng=None, low=0.5, high=2.0):
        """Magnitudes uniform in ``[low, high]`` with random signs."""
        rng = np.random.default_rng(rng)
        count = p * (p - 1) // 2
        mags = rng.uniform(low, high, size=count)
        signs = rng.choice([-1.0, 1.0], size=count)
        return cls(p, tuple((mags * signs).tolist()))

    def positions(self):
        """Table coordinates ``(m, c)`` of each value, in order."""
        return [(m, c) for m in range(1, self.p) for c in range(1, self.p - m + 1)]

    def __len__(self):
        return len(self.values)


class _TracingRow:
    __slots__ = ("_row", "_m", "_log")

    def __init__(self, row, m, log):
        self._row, self._m, self._log = row, m, log

    def __getitem__(self, c):
        self._log.append((self._m, c))
        return self._row[c]

    def __setitem__(self, c, value):
        self._row[c] = value


class _TracingRows:
    __slots__ = ("_rows", "_log")

    def __init__(self, rows, log):
        self._rows, self._log = rows, log

    def __getitem__(self, m):
        return _TracingRow(self._rows[m], m, self._log)


class GammaTable:
    """Entry grid for the bidiagonal factors of one factorization.

    Mutable while the factorization runs, frozen afterwards.  Set
    ``trace`` to a list before running steps to record every ``(row,
    column)`` read as ``(m, s, reads)`` tuples.
    """

    def __init__(self, p, n, tol=0.0):
        if p < 1 or n < 2 or p >= n:
            raise DimensionError(f"need 1 <= p < n, got p={p}, n={n}")
        self.p = p
        self.n = n
        self.tol = tol
        self.flops = 0
        self.trace = None
        self._rows = [[_UNSET] * (p + 1) for _ in range(n)]
        self._free = np.zeros((n, p + 1), dtype=bool)
        self._frozen = False

    def global_index(self, m, c):
        return m * (self.p + 1) - self.p + c

    def locate(self, g):
        """Table coordinates of the entry with global subscript ``g``."""
        m, c = divmod(g + self.p, self.p + 1)
        if not 1 <= m < self.n:
            raise IndexError(f"subscript {g} outside the table")
        return m, c

    def get(self, m, c):
        v = self._rows[m][c]
        if v != v:
            raise SequencingError(f"table entry (m={m}, c={c}) has not been computed")
        return v

    def gamma(self, g):
        """Entry by global subscript."""
        return self.get(*self.locate(g))

    def is_set(self, m, c):
        v = self._rows[m][c]
        return v == v

    def set(self, m, c, value):
        if self._frozen:
            raise AttributeError("GammaTable is frozen")
        self._rows[m][c] = float(value)

    @property
    def entries(self):
        """``(n, p+1)`` array; row 0 and unset entries are NaN."""
        return np.array(self._rows)

    @property
    def free_mask(self):
        return self._free.copy()

    def factor_offdiag(self, c):
        """Subdiagonal of factor ``L(c)`` (rows 1..n-1 of column ``c``)."""
        if not 1 <= c <= self.p:
            raise IndexError(f"factor column {c} outside 1..{self.p}")
        out = np.array([row[c] for row in self._rows[1:]])
        if np.isnan(out).any():
            raise SequencingError(f"factor column {c} is incomplete")
        return out

    def attach_upper_diagonal(self, u):
        """Place ``u_1 .. u_{n-1}`` in column 0."""
        u = np.asarray(u, dtype=np.float64)
        if u.shape[0] < self.n - 1:
            raise DimensionError("diagonal too short for the table")
        for m in range(1, self.n):
            self.set(m, 0, u[m - 1])

    def freeze(self):
        self._frozen = True
        self.trace = None
        return self

    def __repr__(self):
        return f"GammaTable(p={self.p}, n={self.n})"


@dataclass(frozen=True, eq=False)
class OpCountReport:
    p: int
    n: int
    per_entry: np.ndarray = field(repr=False)
    m1_paper: int
    m2_paper: int
    total_paper: int
    m1_summed: int
    m2_summed: int
    measured_flops: int = 0

    @property
    def total_summed(self):
        return self.m1_summed + self.m2_summed

    @property
    def m2_discrepancy(self):
        return self.m2_summed - self.m2_paper

    def as_dict(self):
        return {
            "p": self.p,
            "n": self.n,
            "m1_paper": self.m1_paper,
            "m2_paper": self.m2_paper,
            "total_paper": self.total_paper,
            "m1_summed": self.m1_summed,
            "m2_summed": self.m2_summed,
            "total_summed": self.total_summed,
            "measured_flops": self.measured_flops,
        }


@lru_cache(maxsize=None)
def _numerator_tuples(p, k):
    """Increasing ``k``-tuples from ``1..p`` minus the one solved for."""
    skip = p - k + 1
    return tuple(t for t in combinations(range(1, p + 1), k) if t[0] != skip)


def step_sequence(p, n):
    """All ``(m, s)`` recurrence steps in evaluation order."""
    for m in range(1, min(p - 1, n - 1) + 1):
        for s in range(1, m + 1):
            yield m, s
    for m in range(p, n):
        for s in range(m - p + 1, m + 1):
            yield m, s


def init_gamma_table(L, params=None):
    """Empty table for ``L`` with the free entries placed."""
    if not isinstance(L, UnitLowerBanded):
        raise TypeError(f"expected UnitLowerBanded, got {type(L).__name__}")
    p = L.p
    if params is None:
        params = FreeParameters.ones(p)
    elif not isinstance(params, FreeParameters):
        params = FreeParameters(p, params)
    if params.p != p:
        raise DimensionError(f"free parameters are for p={params.p}, matrix has p={p}")
    tol = BREAKDOWN_RTOL * max(1.0, L.max_abs_subdiagonal())
    table = GammaTable(p, L.n, tol)
    for i, ((m, c), v) in enumerate(zip(params.positions(), params.values)):
        if m >= L.n:
            raise DimensionError(f"order n={L.n} too small for p={p}")
        if abs(v) <= tol:
            # effectively zero, and every free entry ends up as a divisor
            raise InvalidFreeParameter(i, v)
        table.set(m, c, v)
        table._free[m, c] = True
    return table


@lru_cache(maxsize=None)
def _plan(p, k):
    """Numerator tuples for band ``k`` and the flops one step executes:
    ``k - 1`` products and one subtraction per tuple, plus ``k - 2``
    products and one division for the denominator."""
    tuples = _numerator_tuples(p, k)
    return tuples, len(tuples) * k + (k - 1 if k >= 2 else 0)


def _step(rows, lbands, p, m, s, tol):
    """Recurrence arithmetic for step ``(m, s)``; stores and returns
    ``(value, flops)``.  ``rows`` is the table's row list, ``lbands`` the
    subdiagonals of ``L`` as lists."""
    c = p + s - m
    k = m - s + 1
    tuples, flops = _plan(p, k)
    # band[j] is table row m - j, so each term is prod_j band[j][sig[j]]
    band = [rows[m - j] for j in range(k)]
    # Terms can be large and cancel once an earlier entry was small; an
    # exactly rounded sum keeps that cancellation out of the result.
    terms = [-prod(map(getitem, band, sig)) for sig in tuples]
    terms.append(lbands[k - 1][s - 1])
    num = fsum(terms)
    if k > 1:
        divisors = list(map(getitem, band[1:], range(c + 1, c + k)))
        smallest = min(divisors, key=abs)
        if abs(smallest) <= tol:
            raise DarbouxBreakdown(m, s, smallest)
        value = num / prod(divisors)
    else:
        value = num
    if value != value:
        raise SequencingError(f"step (m={m}, s={s}) read an entry that is not yet computed")
    if abs(value) <= tol:
        raise DarbouxBreakdown(m, s, value)
    band[0][c] = value
    return value, flops


def _recurrence(rows, lbands, p, n, tol):
    """All steps of the recurrence in order; returns the flop count.

    Same arithmetic as :func:`_step`, unrolled for the short bands.  Every
    divisor is a free parameter or an entry stored here after passing the
    breakdown test, so only the new value needs checking.
    """
    plans = [None] + [_plan(p, k) for k in range(1, p + 1)]
    flops = 0
    for m in range(1, n):
        r0 = rows[m]
        for s in range(max(1, m - p + 1), m + 1):
            k = m - s + 1
            c = p + s - m
            tuples, fl = plans[k]
            if k == 1:
                terms = [-r0[a] for (a,) in tuples]
                terms.append(lbands[0][s - 1])
                value = fsum(terms)
            else:
                band = rows[m - k + 1 : m + 1][::-1]
                if k == 2:
                    r1 = band[1]
                    terms = [-r0[a] * r1[b] for a, b in tuples]
                elif k == 3:
                    r1, r2 = band[1], band[2]
                    terms = [-r0[a] * r1[b] * r2[d] for a, b, d in tuples]
                else:
                    terms = [-prod(map(getitem, band, sig)) for sig in tuples]
                terms.append(lbands[k - 1][s - 1])
                value = fsum(terms) / prod(map(getitem, band[1:], range(c + 1, c + k)))
            if not abs(value) > tol:
                raise DarbouxBreakdown(m, s, value)
            r0[c] = value
            flops += fl
    return flops


def darboux_step(table, L, m, s):
    """Compute, store and return ``g_{mp+s}``.

    The value solves band ``k = m-s+1`` of row ``m``::

        g = (l[m, s-1] - sum_{sig_1 != p+s-m} prod_j table[m-j+1, sig_j])
            / prod_{j=2..k} table[m-j+1, p+s-m+j-1]

    with the empty sum taken as 0 and the empty product as 1.
    """
    p = table.p
    if not (1 <= m < table.n and max(1, m - p + 1) <= s <= m):
        raise DimensionError(f"step (m={m}, s={s}) is not part of the recurrence for p={p}")
    if L.p != p or L.n != table.n:
        raise DimensionError("table and L disagree on shape")
    if table._frozen:
        raise AttributeError("GammaTable is frozen")
    if table.trace is None:
        value, flops = _step(table._rows, L.band_lists(), p, m, s, table.tol)
    else:
        log = []
        value, flops = _step(_TracingRows(table._rows, log), L.band_lists(), p, m, s, table.tol)
        table.trace.append((m, p + s - m, tuple(log)))
    table.flops += flops
    return value


def darboux_factor(L, params=None):
    """Factor ``L = L(1) ... L(p)`` into unit lower bidiagonal matrices.

    Returns ``(chain, table, op_report)`` where ``chain.lower_factors`` holds
    the ``p`` factors.  ``params`` defaults to all ones.  For ``p = 1`` the
    single factor is ``L`` itself and no arithmetic is done.
    """
    if not isinstance(L, UnitLowerBanded):
        raise TypeError(f"expected UnitLowerBanded, got {type(L).__name__}")
    for b in L.subdiagonals:
        if not np.isfinite(b).all():
            raise ValueError("L has non-finite entries")
    p, n = L.p, L.n
    table = init_gamma_table(L, params)

    if p == 1:
        for m, v in enumerate(L.band_lists()[0], 1):
            table.set(m, 1, v)
        chain = FactorChain(lower_factors=(BidiagonalFactor.unit_lower(L.subdiagonals[0]),))
        report = predicted_op_count(p, n)
        return chain, table.freeze(), _with_measured(report, 0)

    outer = L.subdiagonals[-1]
    small = np.flatnonzero(np.abs(outer) <= table.tol)
    if small.size:
        i = int(small[0])
        raise NotFactorizable(
            f"outermost subdiagonal entry l[{i + p},{i}] is zero", index=i
        )

    table.flops += _recurrence(table._rows, L.band_lists(), p, n, table.tol)

    chain = FactorChain(
        lower_factors=tuple(
            BidiagonalFactor.unit_lower(table.factor_offdiag(c)) for c in range(1, p + 1)
        )
    )
    report = _with_measured(predicted_op_count(p, n), table.flops)
    return chain, table.freeze(), report


def _with_measured(report, flops):
    return OpCountReport(
        report.p, report.n, report.per_entry, report.m1_paper, report.m2_paper,
        report.total_paper, report.m1_summed, report.m2_summed, flops,
    )


def predicted_op_count(p, n):
    """Per-entry cost model ``C(p, m-s+1)(m-s) + 1`` and its aggregates.

    ``m1_paper``/``m2_paper``/``total_paper`` are the published closed
    forms; ``m1_summed``/``m2_summed`` sum the per-entry model directly.
    The two M2 values differ by ``p(n-p)``; both are reported.
    """
    p, n = int(p), int(n)
    if p < 1:
        raise DimensionError(f"p must be >= 1, got {p}")
    if n <= p:
        raise DimensionError(f"need n > p, got n={n}, p={p}")
    # the cost of step (m, s) depends only on its column c = p+s-m (k = p-c+1)
    cost = np.zeros(p + 1, dtype=np.int64)
    for c in range(1, p + 1):
        k = p - c + 1
        cost[c] = comb(p, k) * (k - 1) + 1
    per_entry = np.zeros((n, p + 1), dtype=np.int64)
    for m in range(1, n):
        lo = max(1, p - m + 1)
        per_entry[m, lo:] = cost[lo:]
    per_entry.flags.writeable = False

    half = 2 ** (p - 1)
    m1_paper = p * (p + 1 + (p - 3) * half) // 2
    m2_paper = (n - p) * (1 + (p - 2) * half)
    total_paper = (1 - half) * p * (p - 1) // 2 + (1 + (p - 2) * half) * n
    return OpCountReport(
        p=p,
        n=n,
        per_entry=per_entry,
        m1_paper=int(m1_paper),
        m2_paper=int(m2_paper),
        total_paper=int(total_paper),
        m1_summed=int(per_entry[1:p].sum()),
        m2_summed=int(per_entry[p:].sum()),
    )
