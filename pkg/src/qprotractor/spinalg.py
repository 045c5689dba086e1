"""Spin-j angular momentum algebra.

Conventions used throughout the package:

* hbar = 1.
* Basis vectors are ordered by descending magnetic number, ``m = j, j-1, ..., -j``,
  so index ``k`` (0-based) carries ``m = j - k``.
* ``J_x`` and ``J_y`` follow the Condon-Shortley phase convention
  (``J_+`` has real non-negative matrix elements).
* Eigenvectors of ``n.J`` are fixed up to phase by making their ``m = -j``
  amplitude (or the lowest-m non-vanishing one) real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import AxisNormalizationError, DimensionMismatch, NormalizationError, ValidationError

STRUCT_TOL = 1e-10
NORM_TOL = 1e-12
PHASE_EQ_TOL = 1e-10

AXIS_LABELS = ("x", "y", "z")
_UNIT_AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


@dataclass(frozen=True, order=True)
class HalfInt:
    """Total angular momentum stored exactly as ``twice_j``."""

    twice_j: int

    def __post_init__(self):
        if not isinstance(self.twice_j, (int, np.integer)) or self.twice_j < 0:
            raise ValidationError(f"twice_j must be a non-negative integer, got {self.twice_j!r}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @classmethod
    def parse(cls, value) -> "HalfInt":
        """Accept ``"3/2"``, ``"1"``, ``1.5``, ``Fraction(3, 2)`` or a HalfInt."""
        if isinstance(value, HalfInt):
            return value
        try:
            frac = Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse spin {value!r}") from exc
        twice = 2 * frac
        if twice.denominator != 1 or twice < 0:
            raise ValidationError(f"spin must be a non-negative multiple of 1/2, got {value!r}")
        return cls(int(twice))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_j % 2 == 0

    def ms(self) -> np.ndarray:
        """Magnetic numbers in basis order (descending)."""
        return self.j - np.arange(self.dim)

    def __str__(self):
        return str(self.twice_j // 2) if self.is_integer else f"{self.twice_j}/2"


def as_spin(j) -> HalfInt:
    return HalfInt.parse(j)


def as_axis(axis) -> np.ndarray:
    """Return a unit 3-vector for a label ``'x'|'y'|'z'`` or a 3-sequence.

    Raises :class:`AxisNormalizationError` when a vector is not unit within 1e-12;
    callers wanting automatic normalisation should use :func:`normalize_axis`.
    """
    if isinstance(axis, str):
        try:
            return np.array(_UNIT_AXES[axis.lower()])
        except KeyError:
            raise ValidationError(f"unknown axis label {axis!r}") from None
    vec = np.asarray(axis, dtype=float).reshape(-1)
    if vec.shape != (3,):
        raise ValidationError(f"axis must have 3 components, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_TOL:
        raise AxisNormalizationError(f"axis {vec.tolist()} has norm {float(norm):.15g}, expected 1")
    return vec


def normalize_axis(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=float).reshape(3)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise AxisNormalizationError("zero vector cannot define an axis")
    return vec / norm


def axis_label(axis) -> str | None:
    """Label of a Cartesian axis, or None for a general direction."""
    if isinstance(axis, str):
        return axis.lower()
    vec = as_axis(axis)
    for name, unit in _UNIT_AXES.items():
        if np.allclose(vec, unit, atol=NORM_TOL, rtol=0):
            return name
    return None


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state of a spin-j system in the ``J_z`` eigenbasis."""

    j: HalfInt
    amplitudes: np.ndarray
    basis: str = "z"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        j = as_spin(self.j)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != j.dim:
            raise DimensionMismatch(f"spin {j} needs {j.dim} amplitudes, got {amps.shape[0]}")
        if self.basis != "z":
            raise ValidationError(f"only the 'z' basis is supported for stored states, got {self.basis!r}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"state has squared norm {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize=False, metadata=None) -> "PureState":
        """Infer ``j`` from the vector length; optionally normalise first."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise ValidationError("empty amplitude vector")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise NormalizationError("zero vector cannot be normalised")
            amps = amps / norm
        return cls(HalfInt(amps.size - 1), amps, metadata=dict(metadata or {}))

    @classmethod
    def basis_state(cls, j, m) -> "PureState":
        """``|j, m>_z``."""
        j = as_spin(j)
        twice_m = 2 * Fraction(m)
        k = (j.twice_j - int(twice_m)) // 2
        if twice_m.denominator != 1 or (j.twice_j - int(twice_m)) % 2 or not 0 <= k < j.dim:
            raise ValidationError(f"m={m} is not a valid projection for j={j}")
        amps = np.zeros(j.dim, dtype=complex)
        amps[k] = 1.0
        return cls(j, amps)

    @property
    def dim(self) -> int:
        return self.j.dim

    def to_json(self) -> dict:
        out = {
            "twice_j": self.j.twice_j,
            "basis": self.basis,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        try:
            twice_j = data["twice_j"]
            pairs = data["amplitudes"]
            amps = np.array([complex(re, im) for re, im in pairs])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed PureState JSON: {exc}") from exc
        if not isinstance(twice_j, int) or isinstance(twice_j, bool):
            raise ValidationError("twice_j must be an integer")
        return cls(HalfInt(twice_j), amps, basis=data.get("basis", "z"), metadata=data.get("metadata") or {})


def _amps(state) -> np.ndarray:
    if isinstance(state, PureState):
        return state.amplitudes
    return np.asarray(state, dtype=complex)


@lru_cache(maxsize=None)
def _cartesian_ops(twice_j: int):
    j = HalfInt(twice_j)
    m = j.ms()
    # <m+1| J_+ |m> = sqrt(j(j+1) - m(m+1)), above the diagonal in descending order
    jp = np.zeros((j.dim, j.dim))
    for k in range(1, j.dim):
        jp[k - 1, k] = np.sqrt(j.j * (j.j + 1) - m[k] * (m[k] + 1))
    jx = (jp + jp.T) / 2 + 0j
    jy = (jp - jp.T) / 2j
    jz = np.diag(m) + 0j
    ops = {"x": jx, "y": jy, "z": jz, "+": jp + 0j, "-": jp.T + 0j}
    for op in ops.values():
        op.setflags(write=False)
    return ops


def angular_momentum(j, axis_label: str) -> np.ndarray:
    """Matrix of ``J_x``, ``J_y``, ``J_z`` (or ``'+'``, ``'-'`` ladder operators)."""
    j = as_spin(j)
    try:
        return _cartesian_ops(j.twice_j)[axis_label.lower()].copy()
    except KeyError:
        raise ValidationError(f"unknown operator label {axis_label!r}") from None


def angular_momentum_along(j, axis) -> np.ndarray:
    """``n.J`` for a unit axis ``n``."""
    j = as_spin(j)
    n = as_axis(axis)
    ops = _cartesian_ops(j.twice_j)
    return n[0] * ops["x"] + n[1] * ops["y"] + n[2] * ops["z"]


def casimir(j) -> np.ndarray:
    ops = _cartesian_ops(as_spin(j).twice_j)
    return ops["x"] @ ops["x"] + ops["y"] @ ops["y"] + ops["z"] @ ops["z"]


@lru_cache(maxsize=None)
def _jy_eigvecs(twice_j: int) -> np.ndarray:
    # eigh sorts ascending, i.e. m = -j ... j; relabel to descending order
    _, vecs = np.linalg.eigh(_cartesian_ops(twice_j)["y"])
    vecs = vecs[:, ::-1].copy()
    vecs.setflags(write=False)
    return vecs


def _diag_phases(twice_j: int, theta: float) -> np.ndarray:
    return np.exp(-1j * theta * HalfInt(twice_j).ms())


def _rotation_y(twice_j: int, beta: float) -> np.ndarray:
    vecs = _jy_eigvecs(twice_j)
    return (vecs * _diag_phases(twice_j, beta)) @ vecs.conj().T


def _rotation_z(twice_j: int, alpha: float) -> np.ndarray:
    return np.diag(_diag_phases(twice_j, alpha))


def _polar_angles(n: np.ndarray) -> tuple[float, float]:
    polar = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    azimuth = float(np.arctan2(n[1], n[0])) if np.hypot(n[0], n[1]) > 0 else 0.0
    return polar, azimuth


def _frame_rotation(twice_j: int, n: np.ndarray) -> np.ndarray:
    """Unitary carrying the z axis onto ``n``: ``R_z(azimuth) R_y(polar)``."""
    polar, azimuth = _polar_angles(n)
    return _rotation_z(twice_j, azimuth) @ _rotation_y(twice_j, polar)


def _fix_phases(columns: np.ndarray) -> np.ndarray:
    out = columns.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-6)
        pivot = col[nz[-1]]
        out[:, c] = col * (abs(pivot) / pivot)
    return out


@lru_cache(maxsize=256)
def _eigenbasis_cached(twice_j: int, n: tuple) -> np.ndarray:
    vec = np.array(n)
    label = axis_label(vec)
    if label == "z":
        basis = np.eye(twice_j + 1, dtype=complex)
    else:
        basis = _fix_phases(_frame_rotation(twice_j, vec))
    basis.setflags(write=False)
    return basis


def eigenbasis_matrix(j, axis) -> np.ndarray:
    """Unitary whose column ``k`` is ``|j, j-k>_n`` in the z basis."""
    j = as_spin(j)
    n = as_axis(axis)
    return _eigenbasis_cached(j.twice_j, tuple(float(c) for c in n)).copy()


def eigenbasis(j, axis) -> list[PureState]:
    """Eigenstates of ``n.J`` ordered ``m = j, ..., -j``."""
    j = as_spin(j)
    mat = eigenbasis_matrix(j, axis)
    return [PureState(j, mat[:, k]) for k in range(j.dim)]


def rotation(j, axis, theta: float) -> np.ndarray:
    """``exp(-i theta n.J)``, assembled from the exact spectrum of ``n.J``."""
    j = as_spin(j)
    n = as_axis(axis)
    basis = _eigenbasis_cached(j.twice_j, tuple(float(c) for c in n))
    return (basis * _diag_phases(j.twice_j, theta)) @ basis.conj().T


def inner(a, b) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    va, vb = _amps(a), _amps(b)
    if va.shape != vb.shape:
        raise DimensionMismatch(f"cannot take inner product of shapes {va.shape} and {vb.shape}")
    return complex(np.vdot(va, vb))


def apply(op, state: PureState) -> PureState:
    """Apply a unitary ``op``; the result must remain normalised."""
    op = np.asarray(op)
    if op.shape != (state.dim, state.dim):
        raise DimensionMismatch(f"operator of shape {op.shape} on spin {state.j}")
    return PureState(state.j, op @ state.amplitudes, metadata=state.metadata)


def expectation(op, state) -> float:
    op = np.asarray(op)
    v = _amps(state)
    if op.shape != (v.size, v.size):
        raise DimensionMismatch(f"operator of shape {op.shape} on vector of length {v.size}")
    value = complex(np.vdot(v, op @ v))
    if abs(value.imag) > STRUCT_TOL * max(1.0, abs(value.real)):
        raise ValidationError(f"expectation has imaginary part {value.imag!r}; operator not Hermitian?")
    return value.real


def is_hermitian(op, tol: float = STRUCT_TOL) -> bool:
    op = np.asarray(op)
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.max(np.abs(op - op.conj().T), initial=0.0) < tol


def is_unitary(op, tol: float = STRUCT_TOL) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return np.max(np.abs(op.conj().T @ op - np.eye(op.shape[0]))) < tol


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def same_up_to_phase(a, b, tol: float = PHASE_EQ_TOL) -> bool:
    """Canonical state comparison: ``|<a|b>| > 1 - tol``."""
    return abs(inner(a, b)) > 1.0 - tol


def align_phase(target, reference) -> np.ndarray:
    """Multiply ``target`` by the global phase that best matches ``reference``."""
    t, r = _amps(target), _amps(reference)
    overlap = np.vdot(t, r)
    if abs(overlap) == 0:
        return t.copy()
    return t * (overlap / abs(overlap))


def haar_state(j, rng: np.random.Generator) -> PureState:
    """Haar-random pure state: complex normal amplitudes, normalised."""
    j = as_spin(j)
    v = rng.standard_normal(j.dim) + 1j * rng.standard_normal(j.dim)
    return PureState(j, v / np.linalg.norm(v))


def haar_amplitudes(j, size: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar-random amplitude vectors, shape ``(size, d)``."""
    d = as_spin(j).dim
    v = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def spins_up_to(twice_max: int, start: int = 1) -> Iterable[HalfInt]:
    return (HalfInt(t) for t in range(start, twice_max + 1))


def operator_to_json(op) -> list:
    op = np.asarray(op)
    return [[[float(z.real), float(z.imag)] for z in row] for row in op]


def operator_from_json(rows: Sequence) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


AxisLike = Union[str, Sequence[float], np.ndarray]
