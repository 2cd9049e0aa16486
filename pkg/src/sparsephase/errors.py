"""Exception types shared across the package.

Each carries the process exit code the command line maps it to.
"""


class SparsePhaseError(Exception):
    exit_code = 1


class ValidationError(SparsePhaseError, ValueError):
    """Input data violates a structural or physical invariant."""

    exit_code = 3


class NumericalConsistencyError(SparsePhaseError, ArithmeticError):
    """A computed quantity failed an internal consistency check."""

    exit_code = 4
