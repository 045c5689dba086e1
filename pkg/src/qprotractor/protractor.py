"""Verification and catalogue of quantum protractors.

A state of a spin-j system is an *optimal* protractor about an axis when its
``d = 2j + 1`` copies rotated by ``2 pi k / d`` are mutually orthogonal, which
happens exactly when its distribution over that axis' ``n.J`` eigenbasis is
uniform.  Optimality about x, y and z together makes the state *perfect*.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonexistenceProven, NotCatalogued, ValidationError
from .spinalg import (
    AXIS_LABELS,
    HalfInt,
    PureState,
    as_spin,
    eigenbasis_matrix,
    rotation,
)

ANALYTIC_TOL = 1e-9
NUMERIC_TOL = 1e-5


def axis_distribution(state: PureState, axis) -> np.ndarray:
    """Probabilities ``|<j,m|_n psi>|^2`` ordered ``m = j .. -j``."""
    basis = eigenbasis_matrix(state.j, axis)
    return np.abs(basis.conj().T @ state.amplitudes) ** 2


def max_uniform_deviation(p) -> float:
    p = np.asarray(p)
    return float(np.max(np.abs(p - 1.0 / p.size)))


def is_optimal(state: PureState, axis, tol: float = ANALYTIC_TOL) -> bool:
    return max_uniform_deviation(axis_distribution(state, axis)) <= tol


@dataclass(frozen=True)
class OrthogonalFamily:
    angles: np.ndarray
    states: list
    gram: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(len(self.states)))))


def orthogonal_family(state: PureState, axis) -> OrthogonalFamily:
    """Copies of ``state`` rotated about ``axis`` by ``2 pi k / d``, with their Gram matrix.

    Nothing is raised for non-optimal input; the Gram residual carries the verdict.
    """
    d = state.dim
    angles = 2 * np.pi * np.arange(d) / d
    copies = [rotation(state.j, axis, a) @ state.amplitudes for a in angles]
    mat = np.column_stack(copies)
    gram = mat.conj().T @ mat
    states = [PureState(state.j, v / np.linalg.norm(v)) for v in copies]
    return OrthogonalFamily(angles, states, gram)


@dataclass(frozen=True)
class AxisReport:
    distribution: np.ndarray
    max_prob_deviation: float
    optimal: bool
    gram_residual: float

    def to_dict(self) -> dict:
        return {
            "distribution": [float(p) for p in self.distribution],
            "max_prob_deviation": self.max_prob_deviation,
            "optimal": self.optimal,
            "gram_residual": self.gram_residual,
        }


@dataclass(frozen=True)
class ProtractorReport:
    j: HalfInt
    per_axis: dict
    tol: float

    @property
    def rank(self) -> int:
        return sum(r.optimal for r in self.per_axis.values())

    @property
    def perfect(self) -> bool:
        return self.rank == 3

    def to_dict(self) -> dict:
        return {
            "twice_j": self.j.twice_j,
            "j": str(self.j),
            "tol": self.tol,
            "per_axis": {k: v.to_dict() for k, v in self.per_axis.items()},
            "rank": self.rank,
            "perfect": self.perfect,
        }


def protractor_rank(state: PureState, tol: float = ANALYTIC_TOL) -> ProtractorReport:
    per_axis = {}
    for label in AXIS_LABELS:
        p = axis_distribution(state, label)
        dev = max_uniform_deviation(p)
        per_axis[label] = AxisReport(
            distribution=p,
            max_prob_deviation=dev,
            optimal=dev <= tol,
            gram_residual=orthogonal_family(state, label).residual,
        )
    return ProtractorReport(state.j, per_axis, tol)


def overlap_curve(state: PureState, axis, phis) -> np.ndarray:
    """``|<psi| exp(-i phi n.J) |psi>|^2`` on a grid of angles."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    p = axis_distribution(state, axis)
    ms = state.j.ms()
    amp = np.exp(-1j * np.outer(phis, ms)) @ p
    return np.clip(np.abs(amp) ** 2, 0.0, 1.0)


def uniform_overlap(j, phis) -> np.ndarray:
    """Closed-form overlap curve shared by every optimal protractor of spin ``j``."""
    j = as_spin(j)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    ms = j.ms()
    return np.abs(np.exp(-1j * np.outer(phis, ms)).sum(axis=1) / j.dim) ** 2


# --- phase-state construction --------------------------------------------------


def gauge_index(j) -> int:
    """Index of the amplitude fixed real: ``m = 0`` for integer j, ``m = +j`` otherwise."""
    j = as_spin(j)
    return j.twice_j // 2 if j.is_integer else 0


def wrap_phase(phi):
    """Map angles into (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Phases of a uniform superposition, one per ``m``, with the gauge entry 0."""

    j: HalfInt
    phases: np.ndarray

    def __post_init__(self):
        j = as_spin(self.j)
        phases = wrap_phase(np.array(self.phases, dtype=float).reshape(-1))
        if phases.size != j.dim:
            raise ValidationError(f"spin {j} needs {j.dim} phases, got {phases.size}")
        g = gauge_index(j)
        phases = phases - phases[g]
        phases = wrap_phase(phases)
        phases[g] = 0.0
        phases.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_free(cls, j, free) -> "PhaseVector":
        j = as_spin(j)
        free = np.asarray(free, dtype=float).reshape(-1)
        if free.size != j.dim - 1:
            raise ValidationError(f"spin {j} has {j.dim - 1} free phases, got {free.size}")
        return cls(j, np.insert(free, gauge_index(j), 0.0))

    def free(self) -> np.ndarray:
        return np.delete(self.phases, gauge_index(self.j))

    def state(self, axis="z") -> PureState:
        return uniform_state(self.j, self.phases, axis)

    def to_list(self) -> list:
        return [float(p) for p in self.phases]


def uniform_state(j, phases, axis="z") -> PureState:
    """``sum_m exp(i phi_m) |j,m>_n / sqrt(d)``: an optimal protractor about ``axis``."""
    j = as_spin(j)
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size != j.dim:
        raise ValidationError(f"spin {j} needs {j.dim} phases, got {phases.size}")
    coeffs = np.exp(1j * phases) / np.sqrt(j.dim)
    amps = eigenbasis_matrix(j, axis) @ coeffs
    return PureState(j, amps / np.linalg.norm(amps))


def canonicalize(state: PureState) -> PureState:
    """Remove the global phase so the gauge amplitude is real and non-negative."""
    amps = state.amplitudes
    g = gauge_index(state.j)
    pivot = amps[g] if abs(amps[g]) > 1e-12 else amps[np.flatnonzero(np.abs(amps) > 1e-12)[0]]
    return PureState(state.j, amps * (abs(pivot) / pivot), metadata=state.metadata)


# --- catalogue -----------------------------------------------------------------

_NONEXISTENT = {1: "j=1/2", 4: "j=2", 5: "j=5/2"}


def _spin1_phases():
    q = np.pi / 4
    # (phi_up, phi_down): first the +-pi/4, +-3pi/4 family, then +-3pi/4, +-pi/4
    pairs = [(q, 3 * q), (-q, -3 * q), (3 * q, q), (-3 * q, -q)]
    return [np.array([up, 0.0, down]) for up, down in pairs]


def _spin32_phases():
    a = np.arcsin(1 / np.sqrt(3))
    q = np.pi / 4
    rows = [
        (q, a), (q, np.pi - a),
        (-3 * q, a), (-3 * q, np.pi - a),
        (-q, -a), (-q, a - np.pi),
        (3 * q, -a), (3 * q, a - np.pi),
    ]
    out = []
    for phi_dd, phi_d in rows:
        phi_u = phi_dd + phi_d + np.pi
        out.append(np.array([0.0, phi_u, phi_d, phi_dd]))
    return out


def _spin3_phases():
    t = 0.5 * np.arctan(np.sqrt(15))
    q = np.pi / 4
    # m = 3, 2, 1, 0, -1, -2, -3
    return [np.array([-t - q, q, t + 3 * q, 0.0, -t + q, -q, t - 3 * q])]


SPIN72_FREE_PHASES = {"3/2": -2.30181413, "-3/2": -0.60467766, "-5/2": -1.46074545, "-7/2": -0.57982923}


def spin72_phases(p32, pm32, pm52, pm72) -> np.ndarray:
    """Full j=7/2 phase vector from its four independent phases."""
    theta = -np.arcsin(np.sqrt(7 / 15) * np.sin(pm52 + (pm32 - p32 - pm72) / 2))
    p52 = pm32 - p32 + pm52 + np.pi
    p12 = theta + (p32 + pm32 + pm72) / 2
    pm12 = theta + (p32 + pm32 - pm72) / 2 + np.pi
    # m = 7/2, 5/2, 3/2, 1/2, -1/2, -3/2, -5/2, -7/2
    return np.array([0.0, p52, p32, p12, pm12, pm32, pm52, pm72])


def _spin72_phases():
    b = SPIN72_FREE_PHASES
    return [spin72_phases(b["3/2"], b["-3/2"], b["-5/2"], b["-7/2"])]


_CATALOGUE = {
    2: _spin1_phases,
    3: _spin32_phases,
    6: _spin3_phases,
    7: _spin72_phases,
}


def catalogue_spins() -> list[HalfInt]:
    return [HalfInt(t) for t in sorted(_CATALOGUE)]


def catalogue_size(j) -> int:
    j = as_spin(j)
    _check_catalogued(j)
    return len(_CATALOGUE[j.twice_j]())


def catalogue_tolerance(j) -> float:
    return NUMERIC_TOL if as_spin(j).twice_j == 7 else ANALYTIC_TOL


def _check_catalogued(j: HalfInt):
    if j.twice_j in _NONEXISTENT:
        raise NonexistenceProven(f"no perfect quantum protractor exists for {_NONEXISTENT[j.twice_j]}")
    if j.twice_j not in _CATALOGUE:
        raise NotCatalogued(f"no catalogued perfect protractor for j={j}")


def known_phases(j, variant: int = 0) -> PhaseVector:
    j = as_spin(j)
    _check_catalogued(j)
    entries = _CATALOGUE[j.twice_j]()
    if not 0 <= variant < len(entries):
        raise NotCatalogued(f"j={j} has {len(entries)} catalogued variants, requested {variant}")
    return PhaseVector(j, entries[variant])


def known_protractor(j, variant: int = 0) -> PureState:
    """Perfect protractor from the catalogue (j in {1, 3/2, 3, 7/2})."""
    j = as_spin(j)
    state = known_phases(j, variant).state()
    meta = {"source": "catalogue", "j": str(j), "variant": variant}
    return PureState(j, state.amplitudes, metadata=meta)


def all_known_protractors():
    """Yield ``(j, variant, state)`` over the whole catalogue."""
    for j in catalogue_spins():
        for v in range(catalogue_size(j)):
            yield j, v, known_protractor(j, v)


def cross_product_eigenstate(n, m, j=HalfInt(1), index: int = 0) -> PureState:
    """Eigenstate of ``(n x m).J``: optimal about both ``n`` and ``m`` when j=1/2."""
    axis = np.cross(np.asarray(n, dtype=float), np.asarray(m, dtype=float))
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ValidationError("axes are parallel")
    basis = eigenbasis_matrix(j, axis / norm)
    return PureState(as_spin(j), basis[:, index])


def spin2_rank2_example() -> PureState:
    """A j=2 state optimal about z and x but not y."""
    theta = np.arctan(np.sqrt(5 / 3))
    amps = np.array([np.exp(1j * theta), 1, 1, -1, np.exp(1j * theta)]) / np.sqrt(5)
    return PureState(HalfInt(4), amps)


def anticoherent_spin3() -> PureState:
    """``(|3,2> - |3,-2>)/sqrt(2)``."""
    amps = np.zeros(7, dtype=complex)
    amps[1], amps[5] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    return PureState(HalfInt(6), amps)
