"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for malformed input
(bad state, non-unit axis, mismatched dimensions) and :class:`DomainError` for
well-formed requests that have no answer (e.g. asking the catalogue for a
spin that provably has no perfect protractor).
"""


class ValidationError(ValueError):
    pass


class DimensionMismatch(ValidationError):
    pass


class AxisNormalizationError(ValidationError):
    pass


class NormalizationError(ValidationError):
    pass


class DomainError(Exception):
    pass


class NonexistenceProven(DomainError):
    """No perfect protractor exists for the requested spin."""


class NotCatalogued(DomainError, LookupError):
    pass


class CompletenessViolation(DomainError):
    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(message or f"POVM elements do not sum to identity (residual {self.residual:.3e})")


class UnsupportedSpin(DomainError):
    pass


class RankDeficientFit(DomainError):
    pass
