"""Exception taxonomy shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation (time range,
    set membership, dimension mismatch, ordering of window endpoints)."""


class ConfigurationError(ValueError):
    """Invalid configuration: bad scenario keys, inadmissible projection,
    unknown check id, malformed literals."""


class ConstructionError(ValueError):
    """Operator or set construction failed validation (empty set,
    non-monotone linear part, unusable certificate)."""


class IterationError(RuntimeError):
    """An inner fixed-point iteration exhausted its budget.

    Carries the last residual (and an optional diagnostic bound) so callers
    can report how close the iteration got.
    """

    def __init__(self, message, residual=None, diagnostic=None):
        super().__init__(message)
        self.residual = residual
        self.diagnostic = diagnostic


class ConvergenceError(RuntimeError):
    """A refinement loop did not reach its tolerance.

    ``errors`` holds the sequence of successive-distance measurements.
    """

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors) if errors is not None else []
