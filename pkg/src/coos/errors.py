"""Shared exception types."""


class DomainError(ValueError):
    """Invalid input or state for a domain operation.

    Carries a short machine-readable ``code`` next to the human message so
    service and CLI layers can map failures without string matching.
    """

    def __init__(self, message: str, *, code: str = "domain_error", detail: object = None):
        super().__init__(message)
        self.code = code
        self.detail = detail


class BracketingError(DomainError):
    """A root-finding bracket does not contain a strict sign change."""

    def __init__(self, message: str, *, detail: object = None):
        super().__init__(message, code="bracketing_error", detail=detail)
