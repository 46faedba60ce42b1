"""Exception hierarchy shared by the solvers and the command line."""


class RowLegalError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RowLegalError, ValueError):
    """A coordinate or interval lies outside the domain of a function."""


class ValidationError(RowLegalError, ValueError):
    """Input data violates an invariant (convexity, positive widths, ...).

    ``pointer`` is a JSON-pointer style location when the error comes from a file.
    """

    def __init__(self, message, pointer=None):
        self.pointer = pointer
        if pointer is not None:
            message = f"{pointer}: {message}"
        super().__init__(message)


class InfeasibleError(RowLegalError, ValueError):
    """The cells do not fit into the window (or gap) they are assigned to."""


class OracleLimitError(RowLegalError):
    """A brute-force oracle refuses an instance that is too large for it."""
