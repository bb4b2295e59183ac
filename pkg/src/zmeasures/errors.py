"""Exception hierarchy shared by the library and the command line."""


class ZMeasureError(Exception):
    """Base class for all library errors."""

    exit_code = 2


class ParameterError(ZMeasureError, ValueError):
    """Parameters outside the domain where a formula is valid."""

    exit_code = 2


class PoleError(ParameterError):
    """Argument sits on a pole of a gamma factor or a series coefficient."""


class DomainError(ParameterError):
    """Lattice point or window outside the admissible region."""


class SpectrumError(ParameterError):
    """Kernel spectrum leaves [0, 1] by more than the clipping tolerance."""


class BudgetError(ZMeasureError):
    """Enumeration or summation budget exceeded."""

    exit_code = 3


class ConvergenceError(BudgetError):
    """Series or truncated sum failed to converge within its budget."""
