"""Exception hierarchy.  The CLI maps each family to an exit code."""


class AritylabError(Exception):
    pass


class StructureError(AritylabError, ValueError):
    """Invalid structure data (exit code 2)."""


class StructureSyntaxError(StructureError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class BudgetExceeded(AritylabError):
    """A size cap was hit (exit code 3).  ``required`` is the budget the
    request would have needed; ``frontier`` the last (n, m) completed, if any."""

    def __init__(self, message: str, required: int | None = None, frontier=None):
        super().__init__(message)
        self.required = required
        self.frontier = frontier


class NotInvariantError(AritylabError, ValueError):
    """A relation is not a union of automorphism orbits, so it is not
    0-definable (exit code 2).  ``orbit`` holds two tuples of one orbit
    that the relation separates."""

    def __init__(self, message: str, orbit=None):
        super().__init__(message)
        self.orbit = orbit


class InvariantViolation(AritylabError, AssertionError):
    """An internal consistency check failed (exit code 4)."""
