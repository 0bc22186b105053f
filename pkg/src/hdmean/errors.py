"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateDataError(ValueError):
    """The data admit no well-defined statistic (e.g. a constant column)."""

    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


class NumericError(RuntimeError):
    """A numerical routine failed beyond recovery."""
