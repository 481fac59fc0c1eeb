"""Seeded random banded test matrices."""

import numpy as np

from .band_core import BandedMatrix

__all__ = ["make_dominant_banded", "make_unit_lower"]

_MIN_OUTER = 1e-3


def _uniform_band(rng, size, outer):
    band = rng.uniform(-1.0, 1.0, size=size)
    if outer:
        small = np.abs(band) < _MIN_OUTER
        while small.any():
            band[small] = rng.uniform(-1.0, 1.0, size=int(small.sum()))
            small = np.abs(band) < _MIN_OUTER
    return band


def make_dominant_banded(n, p, q, random_state=None, monic=False):
    """Strictly row diagonally dominant ``(p, q)``-banded matrix.

    Off-diagonal bands are uniform on ``[-1, 1]``; the outermost bands are
    resampled wherever ``|a| < 1e-3``.  The diagonal is the row's absolute
    off-diagonal sum plus one.  ``monic=True`` (requires ``q = 1``) sets the
    superdiagonal to ones.
    """
    if monic and q != 1:
        raise ValueError("monic matrices have exactly one superdiagonal")
    rng = np.random.default_rng(random_state)
    bands = {}
    for d in range(-p, q + 1):
        if d == 0:
            continue
        if monic and d == 1:
            bands[d] = np.ones(n - 1)
        else:
            bands[d] = _uniform_band(rng, n - abs(d), outer=d in (-p, q))
    rowsum = np.zeros(n)
    for d, b in bands.items():
        if d >= 0:
            rowsum[:n - d] += np.abs(b)
        else:
            rowsum[-d:] += np.abs(b)
    bands[0] = rowsum + 1.0
    return BandedMatrix(n, p, q, [bands[d] for d in range(-p, q + 1)])


def make_unit_lower(n, p, random_state=None):
    """The ``L`` factor of a random dominant ``(p, 1)`` matrix."""
    from .banded_lu import lu_banded

    L, _ = lu_banded(make_dominant_banded(n, p, 1, random_state))
    return L
