"""Input coercion helpers used by the estimator and the CLI."""

import numpy as np

from .band_core import BandedMatrix
from .darboux import FreeParameters
from .exceptions import DimensionError


def check_banded(A, lower_bw=None, upper_bw=None):
    """Return ``A`` as a finite ``BandedMatrix``.

    Dense square arrays are accepted; missing bandwidths are inferred from
    the nonzero pattern.
    """
    if not isinstance(A, BandedMatrix):
        A = BandedMatrix.from_dense(A, lower_bw, upper_bw)
    elif lower_bw is not None and A.lower_bw != lower_bw:
        raise DimensionError(f"expected lower bandwidth {lower_bw}, got {A.lower_bw}")
    elif upper_bw is not None and A.upper_bw != upper_bw:
        raise DimensionError(f"expected upper bandwidth {upper_bw}, got {A.upper_bw}")
    if not all(np.isfinite(b).all() for b in A.bands):
        raise ValueError("matrix has non-finite entries")
    return A


def check_rhs(b, n):
    """Right-hand side as a float array of shape ``(n,)`` or ``(n, k)``."""
    b = np.asarray(b, dtype=np.float64)
    if b.ndim not in (1, 2) or b.shape[0] != n:
        raise DimensionError(f"right-hand side must have {n} rows, got shape {b.shape}")
    if not np.isfinite(b).all():
        raise ValueError("right-hand side has non-finite entries")
    return b


def check_free_params(params, p):
    """``None`` (all ones), a sequence of values, or ``FreeParameters``."""
    if params is None:
        return FreeParameters.ones(p)
    if isinstance(params, FreeParameters):
        if params.p != p:
            raise DimensionError(f"free parameters are for p={params.p}, need p={p}")
        return params
    return FreeParameters(p, tuple(np.asarray(params, dtype=np.float64).reshape(-1)))
