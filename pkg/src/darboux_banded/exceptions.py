"""Exception hierarchy shared by every module of the package."""


class BandedError(Exception):
    """Base class for all errors raised by this package.

    ``stage`` is filled in by pipeline drivers (``solve_banded``, the CLI)
    so callers can tell which step failed.
    """

    stage = None


class DimensionError(BandedError, ValueError):
    pass


class ParseError(BandedError, ValueError):
    pass


class PivotBreakdown(BandedError, ArithmeticError):
    def __init__(self, index, value=None):
        self.index = index
        self.value = value
        super().__init__(f"zero pivot at index {index} (value {value!r})")


class NotMonic(BandedError, ValueError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"superdiagonal entry a[{index},{index + 1}] = {value!r} is not 1"
        )


class NotNormalizable(BandedError, ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(
            f"superdiagonal entry a[{index},{index + 1}] is zero; matrix decouples"
        )


class NotFactorizable(BandedError, ValueError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class InvalidFreeParameter(BandedError, ValueError):
    def __init__(self, position, value):
        self.position = position
        self.value = value
        super().__init__(f"free parameter #{position} must be nonzero, got {value!r}")


class DarbouxBreakdown(BandedError, ArithmeticError):
    """A chain entry that must serve as a divisor came out (numerically) zero.

    ``m`` and ``s`` are the 1-based row and loop index of the recurrence step
    that produced or consumed the offending value.
    """

    def __init__(self, m, s, value=None):
        self.m = m
        self.s = s
        self.value = value
        self.suggestion = "retry with a different choice of free parameters"
        super().__init__(
            f"Darboux recurrence broke down at (m={m}, s={s}), value {value!r}; "
            f"{self.suggestion}"
        )


class SequencingError(BandedError, RuntimeError):
    """A recurrence step read a table entry that has not been computed yet."""


class SingularUpper(BandedError, ArithmeticError):
    def __init__(self, index, value=None):
        self.index = index
        self.value = value
        super().__init__(f"upper factor is singular at index {index} (value {value!r})")
