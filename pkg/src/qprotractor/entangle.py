"""Coupling of spins: Clebsch-Gordan tables, embeddings, reductions and rotation overlaps.

Composite vectors use the Kronecker ordering of the parts, each part in its
own m-descending z basis, so ``np.kron(a, b)`` is the product state ``a (x) b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .spinalg import HalfInt, PureState, _cartesian_ops, as_axis, as_spin, rotation

DENSITY_TOL = 1e-10


def _twice(value) -> int:
    """Twice a (half-)integer quantum number given as int, float, Fraction or "3/2"."""
    if isinstance(value, HalfInt):
        return value.twice_j
    frac = Fraction(str(value)) if isinstance(value, str) else Fraction(value).limit_denominator(4)
    twice = 2 * frac
    if twice.denominator != 1:
        raise ValidationError(f"{value!r} is not a multiple of 1/2")
    return int(twice)


def _lowering_total(twice_js) -> np.ndarray:
    """Total J_- on the tensor product of the given spins."""
    mats = [_cartesian_ops(t)["-"] for t in twice_js]
    dims = [t + 1 for t in twice_js]
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for k, m in enumerate(mats):
        factors = [np.eye(d) for d in dims]
        factors[k] = m
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        total += term
    return total


def _product_m(twice_j1: int, twice_j2: int) -> np.ndarray:
    """Twice the total m of each product basis vector."""
    m1 = twice_j1 - 2 * np.arange(twice_j1 + 1)
    m2 = twice_j2 - 2 * np.arange(twice_j2 + 1)
    return (m1[:, None] + m2[None, :]).reshape(-1)


@lru_cache(maxsize=None)
def _coupled_basis(twice_j1: int, twice_j2: int):
    """Columns ``|J, M>`` expressed in the product basis, J then M descending.

    Built by lowering from each highest-weight state; the highest weight of
    every J below the stretched one is fixed by orthogonality, with the sign
    chosen so the coefficient with the largest ``m1`` is positive.
    """
    lower = _lowering_total((twice_j1, twice_j2)).real
    twice_m = _product_m(twice_j1, twice_j2)
    dim = twice_m.size
    columns, labels = [], []
    for twice_J in range(twice_j1 + twice_j2, abs(twice_j1 - twice_j2) - 1, -2):
        sector = np.flatnonzero(twice_m == twice_J)
        prior = [c[sector] for c, (tj, tm) in zip(columns, labels) if tm == twice_J]
        if prior:
            # orthogonal complement inside the M = J sector (one-dimensional)
            q, _ = np.linalg.qr(np.column_stack(prior), mode="complete")
            v_sector = q[:, len(prior)]
        else:
            v_sector = np.ones(1)
        if v_sector[0] < 0:  # sector index 0 carries the largest m1
            v_sector = -v_sector
        top = np.zeros(dim)
        top[sector] = v_sector / np.linalg.norm(v_sector)
        vec = top
        J = twice_J / 2
        for twice_M in range(twice_J, -twice_J - 1, -2):
            columns.append(vec)
            labels.append((twice_J, twice_M))
            M = twice_M / 2
            if twice_M > -twice_J:
                vec = lower @ vec / np.sqrt(J * (J + 1) - M * (M - 1))
    basis = np.column_stack(columns)
    for arr in (basis,):
        arr.setflags(write=False)
    return basis, tuple(labels)


@dataclass(frozen=True, eq=False)
class CGTable:
    """Clebsch-Gordan coefficients ``<j1 m1; j2 m2 | J M>`` for one pair of spins."""

    j1: HalfInt
    j2: HalfInt

    def __post_init__(self):
        object.__setattr__(self, "j1", as_spin(self.j1))
        object.__setattr__(self, "j2", as_spin(self.j2))

    @property
    def basis(self) -> np.ndarray:
        return _coupled_basis(self.j1.twice_j, self.j2.twice_j)[0]

    @property
    def labels(self) -> tuple:
        """``(twice_J, twice_M)`` for each column of :attr:`basis`."""
        return _coupled_basis(self.j1.twice_j, self.j2.twice_j)[1]

    def irrep_columns(self, J) -> np.ndarray:
        tJ = _twice(J)
        idx = [k for k, (a, _) in enumerate(self.labels) if a == tJ]
        if not idx:
            raise ValidationError(f"J={J} does not occur in {self.j1} x {self.j2}")
        return self.basis[:, idx]

    def coefficient(self, J, M, m1, m2) -> float:
        tJ, tM, tm1, tm2 = (_twice(v) for v in (J, M, m1, m2))
        t1, t2 = self.j1.twice_j, self.j2.twice_j
        if (
            tm1 + tm2 != tM
            or abs(tm1) > t1 or abs(tm2) > t2 or abs(tM) > tJ
            or (t1 - tm1) % 2 or (t2 - tm2) % 2 or (tJ - tM) % 2
            or not abs(t1 - t2) <= tJ <= t1 + t2 or (t1 + t2 - tJ) % 2
        ):
            return 0.0
        row = ((t1 - tm1) // 2) * (t2 + 1) + (t2 - tm2) // 2
        col = self.labels.index((tJ, tM))
        return float(self.basis[row, col])

    def coefficients(self) -> dict:
        """Non-zero coefficients keyed by ``(twice_J, twice_M, twice_m1, twice_m2)``."""
        t1, t2 = self.j1.twice_j, self.j2.twice_j
        out = {}
        for col, (tJ, tM) in enumerate(self.labels):
            for row in np.flatnonzero(np.abs(self.basis[:, col]) > 1e-15):
                k1, k2 = divmod(int(row), t2 + 1)
                out[(tJ, tM, t1 - 2 * k1, t2 - 2 * k2)] = float(self.basis[row, col])
        return out


def clebsch_gordan(j1, j2, j, m, m1, m2) -> float:
    """``<j1 m1; j2 m2 | j m>`` in the Condon-Shortley convention; 0 for impossible labels."""
    return CGTable(as_spin(j1), as_spin(j2)).coefficient(j, m, m1, m2)


# --- embedding and reduction ---------------------------------------------------


def _top_irrep_map(parts: list[HalfInt]) -> np.ndarray:
    """Isometry from the highest irrep into the product of ``parts``, coupling left to right."""
    iso = np.eye(parts[0].dim)
    acc = parts[0]
    for p in parts[1:]:
        top = CGTable(acc, p).irrep_columns(HalfInt(acc.twice_j + p.twice_j))
        iso = np.kron(iso, np.eye(p.dim)) @ top
        acc = HalfInt(acc.twice_j + p.twice_j)
    return iso


def embed(state: PureState, parts) -> np.ndarray:
    """Composite amplitudes of a spin-j state placed in the top irrep of ``parts``."""
    parts = [as_spin(p) for p in parts]
    if len(parts) < 2:
        raise ValidationError("need at least two parts")
    if sum(p.twice_j for p in parts) != state.j.twice_j:
        raise ValidationError(f"parts {[str(p) for p in parts]} do not sum to j={state.j}")
    if state.basis != "z":
        raise ValidationError("embedding expects z-basis amplitudes")
    return _top_irrep_map(parts) @ state.amplitudes


def project_top_irrep(composite, parts) -> np.ndarray:
    """Inverse of :func:`embed`: coordinates on the top-irrep basis."""
    parts = [as_spin(p) for p in parts]
    return _top_irrep_map(parts).conj().T @ np.asarray(composite)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatch("density matrix must be square")
        if np.max(np.abs(rho - rho.conj().T)) > DENSITY_TOL:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > DENSITY_TOL:
            raise ValidationError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -DENSITY_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.entries), 0.0, None)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }


def _check_dims(vec: np.ndarray, dims) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != vec.shape[0]:
        raise DimensionMismatch(f"dims {dims} inconsistent with length {vec.shape[0]}")
    return dims


def partial_trace(composite, dims, keep) -> DensityMatrix:
    """Reduced state of the subsystems listed in ``keep`` (order preserved as given)."""
    psi = np.asarray(composite, dtype=complex).reshape(-1)
    dims = _check_dims(psi, dims)
    keep = [int(k) for k in np.atleast_1d(keep)]
    if len(set(keep)) != len(keep) or any(not 0 <= k < len(dims) for k in keep):
        raise ValidationError(f"invalid subsystem indices {keep}")
    rest = [k for k in range(len(dims)) if k not in keep]
    tensor = np.transpose(psi.reshape(dims), keep + rest)
    dk = int(np.prod([dims[k] for k in keep]))
    mat = tensor.reshape(dk, -1)
    rho = mat @ mat.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def entanglement_entropy(rho: DensityMatrix) -> float:
    """von Neumann entropy in nats."""
    lam = rho.eigenvalues()
    lam = lam[lam > 1e-15]
    return float(max(-np.sum(lam * np.log(lam)), 0.0))


# --- rotation overlaps on composites -------------------------------------------


def _parts_from_dims(dims) -> list[HalfInt]:
    return [HalfInt(int(d) - 1) for d in dims]


def total_angular_momentum(dims, axis) -> np.ndarray:
    """``n.J`` summed over all parts of a composite system."""
    n = as_axis(axis)
    parts = _parts_from_dims(dims)
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for k, p in enumerate(parts):
        ops = _cartesian_ops(p.twice_j)
        local = n[0] * ops["x"] + n[1] * ops["y"] + n[2] * ops["z"]
        factors = [np.eye(int(d)) for d in dims]
        factors[k] = local
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        total += term
    return total


def effective_distribution(composite, dims, axis) -> dict:
    """Weights ``p_m`` of the composite on each eigenspace of the total ``n.J``.

    Keys are ``twice_m``; the irrep decomposition enters only through these weights.
    """
    psi = np.asarray(composite, dtype=complex).reshape(-1)
    _check_dims(psi, dims)
    vals, vecs = np.linalg.eigh(total_angular_momentum(dims, axis))
    twice_m = np.rint(2 * vals).astype(int)
    weights = np.abs(vecs.conj().T @ psi) ** 2
    jmax = sum(int(d) - 1 for d in dims)
    return {tm: float(weights[twice_m == tm].sum()) for tm in range(jmax, -jmax - 1, -2)}


def top_irrep_distribution(composite, dims, axis) -> np.ndarray:
    """``p_m`` as an array ordered ``m = j_max .. -j_max``."""
    return np.array(list(effective_distribution(composite, dims, axis).values()))


def composite_overlap_direct(composite, dims, axis, theta) -> complex:
    """``<Psi| R_1 (x) R_2 (x) ... |Psi>`` with each part rotated separately."""
    psi = np.asarray(composite, dtype=complex).reshape(-1)
    _check_dims(psi, dims)
    rot = np.eye(1)
    for p in _parts_from_dims(dims):
        rot = np.kron(rot, rotation(p, axis, theta))
    return complex(psi.conj() @ rot @ psi)


def composite_overlap_reduced(composite, dims, axis, theta) -> complex:
    """``sum_m p_m exp(-i m theta)`` from the effective distribution."""
    dist = effective_distribution(composite, dims, axis)
    return complex(sum(p * np.exp(-0.5j * tm * theta) for tm, p in dist.items()))


@dataclass(frozen=True)
class OverlapComparison:
    direct: complex
    reduced: complex

    @property
    def discrepancy(self) -> float:
        return abs(self.direct - self.reduced)


def composite_overlap_reduction(composite, dims, axis, theta) -> OverlapComparison:
    return OverlapComparison(
        composite_overlap_direct(composite, dims, axis, theta),
        composite_overlap_reduced(composite, dims, axis, theta),
    )
