"""
Exception hierarchy for the multitime recurrence toolkit.

Every error raised by the library derives from MultitimeError, which is a
ValueError so callers that only know about bad input still catch it. The
exit_code attribute is what the command-line front end returns for it.
"""

from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_INCOMPATIBLE = 3
EXIT_NUMERIC = 4
EXIT_NON_CONVERGENCE = 5


class MultitimeError(ValueError):
    """Base class for all library errors."""

    exit_code = EXIT_NUMERIC


class ProblemFileError(MultitimeError):
    """A problem or mesh file could not be parsed."""

    exit_code = EXIT_PARSE

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{location}: {message}"
        super().__init__(message)


class NegativeIndex(MultitimeError):
    """A lattice operation produced a negative coordinate."""


class OutOfWindow(MultitimeError):
    """A table-backed sequence was evaluated outside its stored window."""


class OutOfRange(MultitimeError):
    """A surface-grid cell or node index is outside the grid."""


class NonFiniteValue(MultitimeError):
    """A sequence evaluation produced NaN or infinity."""


class IncompatibleBoundary(MultitimeError):
    """Boundary families disagree where their hyperplanes intersect."""

    exit_code = EXIT_INCOMPATIBLE

    def __init__(self, message: str, report: Optional[Dict[str, Any]] = None):
        self.report = report
        super().__init__(message)


class InsufficientLayers(MultitimeError):
    """An order-k problem was given fewer than k boundary layers."""

    exit_code = EXIT_PARSE


class NotASolution(MultitimeError):
    """A sequence fails the homogeneous recurrence residual check."""


class NotDiagonalConstant(MultitimeError):
    """A sequence is not invariant under the diagonal shift on its window."""


class ZeroVector(MultitimeError):
    """A generator direction vector is zero."""


class NotIdempotentPower(MultitimeError):
    """The matrix does not satisfy A^m = A."""


class UnsupportedMatrix(MultitimeError):
    """The matrix lies outside the supported class for root extraction."""


class NegativePower(MultitimeError):
    """A zero eigenvalue was raised to a negative power."""


class NotDiagonalizable(MultitimeError):
    """The eigenvector matrix is numerically singular."""


class InvertibilityError(MultitimeError):
    """A negative matrix power was requested for a singular matrix."""


class DegenerateCell(MultitimeError):
    """A surface cell has (numerically) collinear difference vectors."""


class SingularJacobian(MultitimeError):
    """The Newton Jacobian could not be factorized."""


class NonConvergence(MultitimeError):
    """Newton iteration did not reach the tolerance.

    The best iterate and the convergence report travel with the exception so
    the caller can still write them out.
    """

    exit_code = EXIT_NON_CONVERGENCE

    def __init__(self, message: str, grid: Any = None, report: Optional[Dict[str, Any]] = None):
        self.grid = grid
        self.report = report or {}
        super().__init__(message)
