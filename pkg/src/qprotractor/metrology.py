"""Rotation-estimation tasks and the spin-1 magnetometry signal model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CompletenessViolation, RankDeficientFit, UnsupportedSpin, ValidationError
from .spinalg import HalfInt, PureState, angular_momentum, as_spin, expectation, rotation
from .uncertainty import variances

COMPLETENESS_TOL = 1e-6
SWEEP_STEPS = 34

# cyclic pair (a, b) for each measurement axis k
CYCLIC_PAIRS = {"z": ("x", "y"), "x": ("y", "z"), "y": ("z", "x")}


# --- Cramer-Rao -----------------------------------------------------------------


def crb_average(state: PureState, n_copies: int = 1) -> float:
    """Mean over x, y, z of the quantum Cramer-Rao bound ``1 / (4 n var_k)``."""
    if n_copies < 1:
        raise ValidationError("n_copies must be >= 1")
    var = variances(state)
    if np.any(var <= 1e-15):
        return float("inf")
    return float(np.mean(1 / (4 * n_copies * var)))


def crb_optimum(j, n_copies: int = 1) -> float:
    j = as_spin(j).j
    return 3 / (4 * n_copies * j * (j + 1))


# --- discrete discrimination ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    elements: list

    @property
    def completeness_residual(self) -> float:
        total = sum(self.elements)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(e).min() for e in self.elements))

    def __len__(self):
        return len(self.elements)


def discrimination_angles(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def _rotated_copies(state: PureState, axis, n: int) -> np.ndarray:
    return np.column_stack([rotation(state.j, axis, t) @ state.amplitudes for t in discrimination_angles(n)])


def covariant_povm(state: PureState, axis, n: int) -> Povm:
    """``Pi_l = (d/n) R(theta_l)|psi><psi|R(theta_l)^dag``; complete only for optimal probes."""
    if n < state.dim:
        raise ValidationError(f"n={n} is smaller than the dimension {state.dim}")
    copies = _rotated_copies(state, axis, n)
    scale = state.dim / n
    povm = Povm([scale * np.outer(v, v.conj()) for v in copies.T])
    if povm.completeness_residual > COMPLETENESS_TOL:
        raise CompletenessViolation(povm.completeness_residual)
    return povm


@dataclass(frozen=True)
class DiscriminationResult:
    probability: float
    terms: np.ndarray
    optimum: float

    def to_dict(self) -> dict:
        return {"probability": self.probability, "optimum": self.optimum, "terms": [float(t) for t in self.terms]}


def optimal_success_probability(d: int, n: int) -> float:
    return 1.0 if n <= d else d / n


def outcome_matrix(state: PureState, axis, n: int) -> np.ndarray:
    """``P[l, k] = Tr(rho_l Pi_k)``: probability of guessing angle k when angle l was applied."""
    povm = covariant_povm(state, axis, n)
    copies = _rotated_copies(state, axis, n)
    probs = np.array([[np.real(v.conj() @ e @ v) for e in povm.elements] for v in copies.T])
    return np.clip(probs, 0.0, 1.0)


def discrete_success_probability(state: PureState, axis, n: int) -> DiscriminationResult:
    terms = np.diag(outcome_matrix(state, axis, n)).copy()
    return DiscriminationResult(float(terms.mean()), terms, optimal_success_probability(state.dim, n))


@dataclass(frozen=True)
class GameSimulation:
    trials: int
    successes: int
    expected: float
    seed: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.expected * (1 - self.expected) / self.trials))

    @property
    def z_score(self) -> float:
        return (self.rate - self.expected) / self.sigma if self.sigma > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "expected": self.expected,
            "binomial_sigma": self.sigma,
            "z_score": self.z_score,
            "seed": self.seed,
        }


def simulate_discrimination(state: PureState, axis, n: int, trials: int, seed: int = 0, shard: int = 10_000) -> GameSimulation:
    """Play the guess-the-angle game ``trials`` times: random angle, one POVM outcome each.

    Trials are split into shards with independent sub-seeds, so the result
    depends only on ``seed``, ``trials`` and ``shard``.
    """
    probs = outcome_matrix(state, axis, n)
    cdf = np.cumsum(probs, axis=1)
    cdf[:, -1] = 1.0
    sizes = [min(shard, trials - k) for k in range(0, trials, shard)]
    successes = 0
    for size, child in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        rng = np.random.default_rng(child)
        applied = rng.integers(0, n, size)
        u = rng.random(size)
        guessed = (u[:, None] >= cdf[applied]).sum(axis=1)
        successes += int(np.sum(guessed == applied))
    expected = float(np.mean(np.diag(probs)))
    return GameSimulation(trials, successes, expected, seed)


# --- spin-1 observables ---------------------------------------------------------


def _require_spin1(state: PureState):
    if state.j.twice_j != 2:
        raise UnsupportedSpin(f"the signal model is defined for j=1 only, got j={state.j}")


def _label(axis_label: str) -> str:
    if axis_label not in CYCLIC_PAIRS:
        raise ValidationError(f"axis label must be one of x, y, z, got {axis_label!r}")
    return axis_label


def m_observables(axis_label: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(J_a^2 - J_b^2, J_a J_b + J_b J_a, J_k)`` for measurement axis k with cyclic pair (a, b)."""
    k = _label(axis_label)
    a, b = CYCLIC_PAIRS[k]
    ja, jb = angular_momentum(1, a), angular_momentum(1, b)
    return ja @ ja - jb @ jb, ja @ jb + jb @ ja, angular_momentum(1, k)


@dataclass(frozen=True)
class MVector:
    m1: float
    m2: float
    m3: float
    axis: str = "z"
    stderr: tuple | None = None

    def as_array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    @property
    def radius(self) -> float:
        return float(np.hypot(self.m1, self.m2))

    def to_dict(self) -> dict:
        out = {"axis": self.axis, "m1": self.m1, "m2": self.m2, "m3": self.m3}
        if self.stderr is not None:
            out["stderr"] = [float(s) for s in self.stderr]
        return out


def m_vector(state: PureState, axis_label: str = "z") -> MVector:
    _require_spin1(state)
    ops = m_observables(axis_label)
    return MVector(*(expectation(op, state) for op in ops), axis=axis_label)


def radius(state: PureState, axis_label: str = "z") -> float:
    """``|<(J_a + i J_b)^2>|``: the radius of the circle traced under rotations about k."""
    _require_spin1(state)
    a, b = CYCLIC_PAIRS[_label(axis_label)]
    raising = angular_momentum(1, a) + 1j * angular_momentum(1, b)
    amps = state.amplitudes
    return float(abs(amps.conj() @ raising @ raising @ amps))


def protractor_target() -> PureState:
    """``(e^{3i pi/4}|+1> + |0> + e^{i pi/4}|-1>)/sqrt(3)`` in the z basis."""
    amps = np.array([np.exp(3j * np.pi / 4), 1.0, np.exp(1j * np.pi / 4)]) / np.sqrt(3)
    return PureState(HalfInt(2), amps)


def prepare_protractor_sequence() -> PureState:
    """Prepare the spin-1 protractor from ``|0>_z`` with an x pulse followed by a z pulse."""
    zero = PureState.basis_state(1, 0)
    seq = rotation(1, "z", -np.pi / 4) @ rotation(1, "x", -np.arccos(1 / np.sqrt(3)))
    out = seq @ zero.amplitudes
    return PureState(HalfInt(2), out / np.linalg.norm(out))


def sweep_angles(steps: int = SWEEP_STEPS) -> np.ndarray:
    return np.pi * np.arange(steps) / steps


def rotation_sweep(state: PureState, axis_label: str, angles=None) -> np.ndarray:
    """Rows ``(theta, m1, m2, m3)`` after rotating by theta about the measurement axis."""
    _require_spin1(state)
    angles = sweep_angles() if angles is None else np.asarray(angles, dtype=float)
    ops = m_observables(axis_label)
    rows = []
    for t in angles:
        v = rotation(1, axis_label, t) @ state.amplitudes
        rows.append([t, *(float(np.real(v.conj() @ op @ v)) for op in ops)])
    return np.array(rows)


@dataclass(frozen=True)
class CircleFit:
    center: tuple
    radius: float
    rms_residual: float


def fit_circle(points) -> CircleFit:
    """Algebraic least-squares circle through 2-D points."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    design = np.column_stack([x, y, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, x**2 + y**2, rcond=None)
    cx, cy = coef[0] / 2, coef[1] / 2
    r = float(np.sqrt(coef[2] + cx**2 + cy**2))
    resid = np.hypot(x - cx, y - cy) - r
    return CircleFit((float(cx), float(cy)), r, float(np.sqrt(np.mean(resid**2))))


# --- signal model ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SignalParams:
    eta: float = 1.0
    zeta: float = 1.0
    gamma1: float = 2.0
    gamma2: float = 1.0
    omega_L: float = 50.0
    noise_sigma: float = 0.0
    times: np.ndarray = field(default_factory=lambda: np.linspace(0.0, 1.0, 2000))

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValidationError("decay rates must be non-negative")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be non-negative")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValidationError("times must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "zeta": self.zeta,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "omega_L": self.omega_L,
            "noise_sigma": self.noise_sigma,
            "points": int(self.times.size),
            "t_start": float(self.times[0]) if self.times.size else None,
            "t_stop": float(self.times[-1]) if self.times.size else None,
        }


def signal_design(times, p: SignalParams) -> np.ndarray:
    """Columns multiplying (m1, m2, m3) in the polarization-rotation signal."""
    t = np.asarray(times, dtype=float)
    osc = p.eta * np.exp(-p.gamma1 * t)
    return np.column_stack([osc * np.sin(2 * p.omega_L * t), osc * np.cos(2 * p.omega_L * t), -p.zeta * np.exp(-p.gamma2 * t)])


def synthesize_signal(m: MVector, p: SignalParams, seed: int = 0) -> np.ndarray:
    """Rows ``(t, delta_alpha)`` with i.i.d. Gaussian noise of width ``noise_sigma``."""
    clean = signal_design(p.times, p) @ m.as_array()
    noise = np.random.default_rng(seed).normal(0.0, p.noise_sigma, clean.size) if p.noise_sigma > 0 else 0.0
    return np.column_stack([p.times, clean + noise])


@dataclass(frozen=True)
class SignalFit:
    m: MVector
    residual_rms: float
    covariance: np.ndarray

    def to_dict(self) -> dict:
        return {**self.m.to_dict(), "residual_rms": self.residual_rms}


def fit_signal(trace, p: SignalParams, axis_label: str = "z", cond_limit: float = 1e10) -> SignalFit:
    """Linear least squares for (m1, m2, m3) with the decay and frequency parameters known."""
    trace = np.asarray(trace, dtype=float)
    if trace.ndim != 2 or trace.shape[1] != 2:
        raise ValidationError("trace must have two columns (t, delta_alpha)")
    if trace.shape[0] < 16:
        raise ValidationError("trace needs at least 16 samples")
    t, y = trace[:, 0], trace[:, 1]
    design = signal_design(t, p)
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= sv[0] / cond_limit:
        raise RankDeficientFit(f"design matrix is rank deficient (singular values {sv.tolist()})")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = t.size - design.shape[1]
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    stderr = tuple(float(v) for v in np.sqrt(np.diag(cov)))
    m = MVector(*map(float, coef), axis=axis_label, stderr=stderr)
    return SignalFit(m, float(np.sqrt(np.mean(resid**2))), cov)
