class PamapsError(Exception):
    """Base class for domain errors raised by the library."""


class DomainError(PamapsError, ValueError):
    """An input violates an operation's precondition."""


class BudgetExceeded(PamapsError, RuntimeError):
    """A segment or iteration budget was exhausted."""


class ParseError(PamapsError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InfeasibleError(DomainError):
    """A matching or linear system has no admissible solution."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)
