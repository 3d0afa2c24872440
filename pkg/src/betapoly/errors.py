"""Exception types shared across the package.

The CLI maps these onto its exit-code convention: domain errors are usage
problems (exit 2), numerical and degeneracy errors are computation failures
(exit 3), comparison failures exit 1.
"""


class BetapolyError(Exception):
    """Base class for package errors."""


class DomainError(BetapolyError, ValueError):
    """A parameter lies outside the documented domain of an operation."""


class DegeneracyError(BetapolyError, RuntimeError):
    """A point configuration violated a general-position tolerance.

    Callers that own the random stream resample; deterministic callers
    propagate.
    """


class NumericalError(BetapolyError, RuntimeError):
    """An iterative procedure exhausted its budget or lost accuracy.

    `partial` optionally carries the best result obtained before the failure.
    """

    def __init__(self, *args, partial=None):
        super().__init__(*args)
        self.partial = partial


class ConsistencyError(BetapolyError, RuntimeError):
    """Two routes that must agree (formula vs. simulation plumbing) did not."""
