"""Spin-j quantum protractors: verification, search, uncertainty, entanglement and metrology."""

from .errors import (
    AxisNormalizationError,
    CompletenessViolation,
    DimensionMismatch,
    DomainError,
    NonexistenceProven,
    NormalizationError,
    NotCatalogued,
    RankDeficientFit,
    UnsupportedSpin,
    ValidationError,
)
from .spinalg import HalfInt, PureState, angular_momentum, eigenbasis, rotation
from .protractor import known_protractor, protractor_rank

__all__ = [
    "AxisNormalizationError",
    "CompletenessViolation",
    "DimensionMismatch",
    "DomainError",
    "HalfInt",
    "NonexistenceProven",
    "NormalizationError",
    "NotCatalogued",
    "PureState",
    "RankDeficientFit",
    "UnsupportedSpin",
    "ValidationError",
    "angular_momentum",
    "eigenbasis",
    "known_protractor",
    "protractor_rank",
    "rotation",
]
