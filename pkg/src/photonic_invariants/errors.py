"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument failed validation (shape, range, mode count, ...)."""


class CapacityError(OverflowError):
    """A size does not fit in a platform integer."""


class ContractViolation(ValueError):
    """An input breaks a numerical contract, e.g. a non-Hermitian matrix."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class ComplexityError(RuntimeError):
    """The requested computation exceeds the configured term or size limit."""

    def __init__(self, terms: int, limit: int, what: str = "terms"):
        self.terms = terms
        self.limit = limit
        super().__init__(
            f"refusing to evaluate {terms} {what} (limit {limit}); "
            "raise the limit explicitly to proceed"
        )
