"""Entropic and variance-based uncertainty functionals.

All logarithms are natural (entropies in nats).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .protractor import axis_distribution
from .spinalg import (
    AXIS_LABELS,
    PureState,
    angular_momentum,
    angular_momentum_along,
    as_spin,
    eigenbasis_matrix,
    expectation,
)

PROB_SUM_TOL = 1e-9
DEFAULT_ALPHAS = (0.5, 2.0, np.inf)


def _as_probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-15):
        raise DomainError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise ValidationError(f"probabilities sum to {p.sum():.12g}, not 1")
    return np.clip(p, 0.0, None)


def shannon_entropy(p) -> float:
    p = _as_probabilities(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in nats; ``alpha = 1`` is Shannon, ``inf`` is min-entropy."""
    if alpha < 0:
        raise ValidationError("alpha must be non-negative")
    p = _as_probabilities(p)
    if alpha == 1:
        return shannon_entropy(p)
    if alpha == 0:
        return float(np.log(np.count_nonzero(p)))
    if np.isinf(alpha):
        return float(-np.log(p.max()))
    return float(np.log(np.sum(p[p > 0] ** alpha)) / (1 - alpha))


def axis_entropies(state: PureState, alpha: float = 1.0) -> np.ndarray:
    return np.array([renyi_entropy(axis_distribution(state, a), alpha) for a in AXIS_LABELS])


def entropy_sum(state: PureState) -> float:
    return float(axis_entropies(state).sum())


def first_moments(state: PureState) -> np.ndarray:
    return np.array([expectation(angular_momentum(state.j, a), state) for a in AXIS_LABELS])


def variance(state: PureState, axis) -> float:
    op = angular_momentum_along(state.j, axis)
    mean = expectation(op, state)
    return max(expectation(op @ op, state) - mean**2, 0.0)


def variances(state: PureState) -> np.ndarray:
    return np.array([variance(state, a) for a in AXIS_LABELS])


@dataclass(frozen=True)
class PythagoreanMeans:
    arithmetic: float
    geometric: float
    harmonic: float | None  # None when some variance vanishes

    def to_dict(self) -> dict:
        return {"arithmetic": self.arithmetic, "geometric": self.geometric, "harmonic": self.harmonic}


def means_of(values) -> PythagoreanMeans:
    v = np.asarray(values, dtype=float)
    arith = float(v.mean())
    geo = float(np.prod(np.clip(v, 0, None)) ** (1 / v.size))
    harm = None if np.any(v <= 0) else float(v.size / np.sum(1 / v))
    return PythagoreanMeans(arith, geo, harm)


def pythagorean_means(state: PureState) -> PythagoreanMeans:
    return means_of(variances(state))


def variance_bound(j) -> float:
    """``j(j+1)/3``: the common ceiling of all three variance means."""
    j = as_spin(j).j
    return j * (j + 1) / 3


def anticoherence_order1(state: PureState, tol: float = 1e-10) -> bool:
    return bool(np.all(np.abs(first_moments(state)) <= tol))


def halfspin_certainty_bound() -> float:
    """Largest possible x+y+z entropy sum for a spin-1/2 state, in nats."""
    return (3 * np.log(6) - np.sqrt(3) * np.log(2 + np.sqrt(3))) / 2


# --- batched evaluation over many states (rows of an amplitude array) -----------


def batch_distributions(j, amps, axis) -> np.ndarray:
    """Axis distributions for each row of ``amps``."""
    basis = eigenbasis_matrix(j, axis)
    return np.abs(np.asarray(amps) @ basis.conj()) ** 2


def batch_entropy_sums(j, amps) -> np.ndarray:
    total = 0.0
    for a in AXIS_LABELS:
        p = batch_distributions(j, amps, a)
        total = total - np.sum(p * np.log(np.maximum(p, 1e-300)), axis=1)
    return total


def batch_variances(j, amps) -> np.ndarray:
    """Shape ``(n, 3)``: variances along x, y, z for each row."""
    amps = np.asarray(amps)
    cols = []
    for a in AXIS_LABELS:
        op = angular_momentum(j, a)
        v = amps @ op.T
        mean = np.real(np.sum(amps.conj() * v, axis=1))
        second = np.real(np.sum(v.conj() * v, axis=1))
        cols.append(np.maximum(second - mean**2, 0.0))
    return np.stack(cols, axis=1)


def batch_means(values) -> dict:
    """Arithmetic, geometric and harmonic means along the last axis (harmonic NaN if undefined)."""
    v = np.asarray(values, dtype=float)
    arith = v.mean(axis=-1)
    geo = np.prod(np.clip(v, 0, None), axis=-1) ** (1 / v.shape[-1])
    with np.errstate(divide="ignore"):
        harm = np.where(np.all(v > 0, axis=-1), v.shape[-1] / np.sum(1 / np.where(v > 0, v, 1), axis=-1), np.nan)
    return {"arithmetic": arith, "geometric": geo, "harmonic": harm}


def trivial_entropy_bound(j) -> float:
    return 3 * np.log(as_spin(j).dim)


@dataclass(frozen=True)
class UncertaintyProfile:
    shannon_per_axis: np.ndarray
    renyi: dict
    variances: np.ndarray
    means: PythagoreanMeans
    first_moments: np.ndarray
    entropy_sum: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "entropy_sum", float(np.sum(self.shannon_per_axis)))

    def to_dict(self) -> dict:
        return {
            "shannon_per_axis": dict(zip(AXIS_LABELS, map(float, self.shannon_per_axis))),
            "entropy_sum": self.entropy_sum,
            "renyi": {str(a): dict(zip(AXIS_LABELS, map(float, v))) for a, v in self.renyi.items()},
            "variances": dict(zip(AXIS_LABELS, map(float, self.variances))),
            "means": self.means.to_dict(),
            "first_moments": dict(zip(AXIS_LABELS, map(float, self.first_moments))),
        }


def uncertainty_profile(state: PureState, alphas=DEFAULT_ALPHAS) -> UncertaintyProfile:
    var = variances(state)
    return UncertaintyProfile(
        shannon_per_axis=axis_entropies(state),
        renyi={a: axis_entropies(state, a) for a in alphas},
        variances=var,
        means=means_of(var),
        first_moments=first_moments(state),
    )
