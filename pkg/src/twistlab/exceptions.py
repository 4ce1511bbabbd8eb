"""Exception hierarchy shared by every twistlab module."""


class TwistlabError(Exception):
    """Base class for all library errors."""


class DomainError(TwistlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedOperation(TwistlabError, TypeError):
    """The operation is not defined for this kind of object."""


class UsageError(TwistlabError, ValueError):
    """Incompatible arguments (mismatched jets, bad orders, empty grids)."""


class ConvergenceError(TwistlabError, ArithmeticError):
    """A bracketing or bisection search failed to converge.

    The ``diagnostics`` mapping carries the last bracket and iteration count
    so callers can report where the search got stuck.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"
