"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class FactorizationError(DomainError):
    """Cholesky factorization failed; ``pivot`` is the 0-based failing row."""

    def __init__(self, pivot, value):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} "
            f"(leading minor of order {pivot + 1}) has value {value:.6g}",
            index=pivot,
        )
        self.pivot = pivot
        self.value = value


class DegenerateInputError(ValueError):
    """Input has no variability where some is required (e.g. a constant column)."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class DimensionError(ValueError):
    pass


class SchemaError(ValueError):
    """Two tables disagree on columns or column kinds."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = list(columns)


class DegenerateTableError(ValueError):
    """A contingency table reduces to a single row or column; chi-squared is inapplicable."""


class CsvParseError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
