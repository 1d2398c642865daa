class DomainError(ValueError):
    """Raised when an input violates a mathematical precondition.

    The CLI maps this to exit code 1 and a JSON error object.
    """


class Unverifiable(DomainError):
    """A property could not be certified with desk-scale resources."""

    def __init__(self, message: str, partial: dict | None = None):
        super().__init__(message)
        self.partial = partial or {}
