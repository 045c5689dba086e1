"""Numerical search for perfect protractors.

A state uniform in the z basis, ``psi_k = exp(i phi_k) / sqrt(d)``, is already
optimal about z, so perfection only requires uniform x and y distributions.
The objective

    f(phi) = H(p^x) + H(p^y) - 2 ln d

is therefore <= 0 with equality exactly at perfect protractors.  It is
maximized over the ``2j`` free phases by multi-start quasi-Newton ascent.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ValidationError
from .protractor import PhaseVector, gauge_index, wrap_phase
from .spinalg import HalfInt, as_spin, eigenbasis_matrix

_LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class SearchConfig:
    j: HalfInt
    starts: int = 64
    max_iterations: int = 500
    objective_tolerance: float = 1e-9
    step_tolerance: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "j", as_spin(self.j))
        if self.starts < 1:
            raise ValidationError("starts must be >= 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.objective_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValidationError("tolerances must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["j"] = str(self.j)
        return out


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_phases: PhaseVector
    best_objective: float
    converged_starts: int
    is_perfect_candidate: bool
    trace: np.ndarray
    best_start: int
    seed: int
    iterations: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "twice_j": self.best_phases.j.twice_j,
            "j": str(self.best_phases.j),
            "best_phases": self.best_phases.to_list(),
            "best_objective": self.best_objective,
            "converged_starts": self.converged_starts,
            "is_perfect_candidate": self.is_perfect_candidate,
            "best_start": self.best_start,
            "seed": self.seed,
            "trace": [float(v) for v in self.trace],
        }


class EntropyObjective:
    """Batched evaluation of ``f`` and its gradient over free phases."""

    def __init__(self, j):
        self.j = as_spin(j)
        self.d = self.j.dim
        self.gauge = gauge_index(self.j)
        # rows of U give <j,m|_axis in the z basis
        self.transforms = [eigenbasis_matrix(self.j, a).conj().T for a in ("x", "y")]

    def full_phases(self, free):
        free = np.atleast_2d(np.asarray(free, dtype=float))
        return np.insert(free, self.gauge, 0.0, axis=1)

    def _amplitudes(self, free):
        return np.exp(1j * self.full_phases(free)) / np.sqrt(self.d)

    def value(self, free) -> np.ndarray:
        psi = self._amplitudes(free)
        total = -2 * np.log(self.d)
        for u in self.transforms:
            p = np.abs(psi @ u.T) ** 2
            total = total - np.sum(p * np.log(np.maximum(p, _LOG_FLOOR)), axis=1)
        return total

    def value_and_gradient(self, free):
        psi = self._amplitudes(free)
        total = np.full(psi.shape[0], -2 * np.log(self.d))
        grad = np.zeros(psi.shape, dtype=float)
        for u in self.transforms:
            a = psi @ u.T
            p = np.abs(a) ** 2
            logp = np.log(np.maximum(p, _LOG_FLOOR))
            total -= np.sum(p * logp, axis=1)
            # dp_m/dphi_k = 2 Re(conj(a_m) U_mk i psi_k); sum_m dp_m = 0 drops the "+1"
            grad -= 2 * np.real(1j * psi * ((logp * a.conj()) @ u))
        return total, np.delete(grad, self.gauge, axis=1)


def _as_free(j: HalfInt, phases) -> np.ndarray:
    if isinstance(phases, PhaseVector):
        return phases.free()
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size == j.dim:
        return PhaseVector(j, phases).free()
    if phases.size == j.dim - 1:
        return phases
    raise ValidationError(f"spin {j} takes {j.dim} phases (or {j.dim - 1} free ones), got {phases.size}")


def objective(j, phases) -> float:
    """``H(p^x) + H(p^y) - 2 ln d`` for the z-uniform state with the given phases."""
    j = as_spin(j)
    return float(EntropyObjective(j).value(_as_free(j, phases))[0])


def gradient(j, phases) -> np.ndarray:
    """Analytic gradient of :func:`objective` with respect to the free phases."""
    j = as_spin(j)
    return EntropyObjective(j).value_and_gradient(_as_free(j, phases))[1][0]


def start_points(config: SearchConfig) -> np.ndarray:
    """One independent sub-stream per start, so start ``k`` never depends on the total count."""
    children = np.random.SeedSequence(config.seed).spawn(config.starts)
    n = config.j.dim - 1
    return np.array([np.random.default_rng(c).uniform(-np.pi, np.pi, n) for c in children]).reshape(config.starts, n)


def _bfgs_ascent(fn: EntropyObjective, x0: np.ndarray, config: SearchConfig):
    """Batched BFGS on ``-f`` with Armijo backtracking; each row is an independent start."""
    x = x0.copy()
    nstart, n = x.shape
    val, grad = fn.value_and_gradient(x)
    g, dg = -val, -grad
    hinv = np.tile(np.eye(n), (nstart, 1, 1))
    active = np.ones(nstart, dtype=bool)
    converged = np.zeros(nstart, dtype=bool)
    iterations = np.zeros(nstart, dtype=int)
    if n == 0:
        return x, -g, np.ones(nstart, dtype=bool), iterations

    converged |= np.linalg.norm(dg, axis=1) < 1e-10
    active &= ~converged
    for _ in range(config.max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        iterations[idx] += 1
        direction = -np.einsum("bij,bj->bi", hinv[idx], dg[idx])
        slope = np.einsum("bi,bi->b", direction, dg[idx])
        bad = slope >= 0
        if np.any(bad):
            hinv[idx[bad]] = np.eye(n)
            direction[bad] = -dg[idx[bad]]
            slope[bad] = -np.einsum("bi,bi->b", dg[idx[bad]], dg[idx[bad]])

        step = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        new_x = x[idx].copy()
        new_g = g[idx].copy()
        new_dg = dg[idx].copy()
        for _ in range(60):
            todo = np.flatnonzero(~accepted)
            if todo.size == 0:
                break
            trial = x[idx[todo]] + step[todo, None] * direction[todo]
            tv, tg = fn.value_and_gradient(trial)
            ok = -tv <= g[idx[todo]] + 1e-4 * step[todo] * slope[todo]
            hit = todo[ok]
            new_x[hit], new_g[hit], new_dg[hit] = trial[ok], -tv[ok], -tg[ok]
            accepted[hit] = True
            step[todo[~ok]] *= 0.5

        s = new_x - x[idx]
        y = new_dg - dg[idx]
        sy = np.einsum("bi,bi->b", s, y)
        upd = accepted & (sy > 1e-14)
        for b in np.flatnonzero(upd):
            rho = 1.0 / sy[b]
            v = np.eye(n) - rho * np.outer(s[b], y[b])
            hinv[idx[b]] = v @ hinv[idx[b]] @ v.T + rho * np.outer(s[b], s[b])

        x[idx], g[idx], dg[idx] = new_x, new_g, new_dg
        step_norm = np.linalg.norm(s, axis=1)
        done = (np.linalg.norm(new_dg, axis=1) < 1e-10) | (accepted & (step_norm < config.step_tolerance))
        converged[idx[done]] = True
        # a line search that cannot improve means we sit at numerical stationarity
        stalled = ~accepted
        converged[idx[stalled]] = True
        active[idx[done | stalled]] = False
    return x, -g, converged, iterations


def search_perfect(config: SearchConfig) -> SearchResult:
    """Multi-start maximization of the entropy objective; deterministic given the seed."""
    fn = EntropyObjective(config.j)
    x, values, converged, iterations = _bfgs_ascent(fn, start_points(config), config)
    # deterministic reduction: highest objective, ties to the lowest start index
    order = sorted(range(config.starts), key=lambda k: (-values[k], k))
    best = order[0]
    best_value = float(min(values[best], 0.0))
    return SearchResult(
        best_phases=PhaseVector.from_free(config.j, wrap_phase(x[best])),
        best_objective=best_value,
        converged_starts=int(converged.sum()),
        is_perfect_candidate=best_value >= -config.objective_tolerance,
        trace=values.copy(),
        best_start=best,
        seed=config.seed,
        iterations=iterations,
    )


def nonexistence_margin(j, config: SearchConfig | None = None) -> float:
    """``-max f`` found by an intensive search: positive values corroborate nonexistence (not a proof)."""
    j = as_spin(j)
    if config is None:
        config = SearchConfig(j, starts=1024)
    elif config.j != j:
        raise ValidationError("config spin does not match j")
    return -search_perfect(config).best_objective


def halfspin_margin() -> float:
    """Closed-form margin for j=1/2: the best phase is pi/4, giving equal x and y distributions."""
    q = (1 + 1 / np.sqrt(2)) / 2
    h = -(q * np.log(q) + (1 - q) * np.log(1 - q))
    return 2 * np.log(2) - 2 * h


def grid_maximum(j, points: int, chunk: int = 200_000) -> tuple[float, np.ndarray]:
    """Exhaustive scan of ``f`` over a regular grid of the free phases."""
    j = as_spin(j)
    fn = EntropyObjective(j)
    n = j.dim - 1
    axis = -np.pi + 2 * np.pi * np.arange(points) / points
    total = points**n
    best_val, best_x = -np.inf, None
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        digits = np.stack(np.unravel_index(flat, (points,) * n), axis=1)
        pts = axis[digits]
        vals = fn.value(pts)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_x = float(vals[k]), pts[k]
    return best_val, best_x


def polish(j, free, iterations: int = 200) -> tuple[float, np.ndarray]:
    """Local quasi-Newton refinement of one phase vector."""
    j = as_spin(j)
    cfg = SearchConfig(j, starts=1, max_iterations=iterations)
    x, vals, _, _ = _bfgs_ascent(EntropyObjective(j), np.atleast_2d(np.asarray(free, dtype=float)), cfg)
    return float(vals[0]), x[0]


# Margins -max f for spins without a perfect protractor, frozen from a grid
# scan plus local polishing (j=2) and a large multi-start run (j=5/2).
RECORDED_MARGINS = {
    1: 0.5533032997205156,  # closed form, see halfspin_margin
    4: 0.21133180345438,  # 120^4 grid (best -0.2114121), polished
    5: 0.05399486288456,  # 4 x 4096 starts and a polished 24^5 grid agree
}
