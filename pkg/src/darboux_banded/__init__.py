"""Banded linear systems through chains of bidiagonal factors.

The unit lower factor ``L`` of a pivot-free banded LU is split into ``p``
unit lower bidiagonal matrices (and ``U`` into ``q`` upper ones), so that
``A x = b`` is solved by ``p + q`` two-term substitutions.
"""

from .band_core import (
    BandedMatrix,
    BidiagonalFactor,
    FactorChain,
    UnitLowerBanded,
    UpperBanded,
    band_get,
    inf_norm,
    multiply_chain,
    residual_inf_norm,
)
from .banded_lu import lu_banded, lu_hessenberg_monic, normalize_superdiagonal
from .chain_solver import (
    SolveReport,
    darboux_factor_upper,
    factor_banded,
    solve_banded,
    solve_chain,
    solve_unit_lower_bidiagonal,
    solve_upper_bidiagonal,
)
from .darboux import (
    FreeParameters,
    GammaTable,
    OpCountReport,
    darboux_factor,
    darboux_step,
    init_gamma_table,
    predicted_op_count,
)
from .datasets import make_dominant_banded
from .estimator import DarbouxSolver
from .exceptions import (
    BandedError,
    DarbouxBreakdown,
    DimensionError,
    InvalidFreeParameter,
    NotFactorizable,
    NotMonic,
    NotNormalizable,
    ParseError,
    PivotBreakdown,
    SequencingError,
    SingularUpper,
)

__version__ = "0.1.0"

__all__ = [
    "BandedMatrix",
    "BidiagonalFactor",
    "FactorChain",
    "UnitLowerBanded",
    "UpperBanded",
    "band_get",
    "inf_norm",
    "multiply_chain",
    "residual_inf_norm",
    "SolveReport",
    "darboux_factor_upper",
    "factor_banded",
    "solve_banded",
    "solve_chain",
    "solve_unit_lower_bidiagonal",
    "solve_upper_bidiagonal",
    "FreeParameters",
    "GammaTable",
    "OpCountReport",
    "darboux_factor",
    "darboux_step",
    "init_gamma_table",
    "predicted_op_count",
    "BandedError",
    "DarbouxBreakdown",
    "DimensionError",
    "InvalidFreeParameter",
    "NotFactorizable",
    "NotMonic",
    "NotNormalizable",
    "ParseError",
    "PivotBreakdown",
    "SequencingError",
    "SingularUpper",
    "lu_banded",
    "lu_hessenberg_monic",
    "normalize_superdiagonal",
    "make_dominant_banded",
    "DarbouxSolver",
    "__version__",
]
