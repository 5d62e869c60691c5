"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateInputError(ValueError):
    """Input data cannot support the requested estimate (e.g. no positives)."""


class NumericalError(ArithmeticError):
    """An iterative numerical routine failed to converge."""


class OutcomeFormatError(ValueError):
    """A row of an outcome file could not be parsed."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row
