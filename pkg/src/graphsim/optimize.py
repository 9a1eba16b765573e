"""Derivative-free parameter search over the QAOA angles.

One local method (Nelder-Mead), one deterministic global method (DIRECT),
and a seeded random baseline share a single bounded-box minimize() entry
point with exact evaluation accounting.  The method enumeration leaves room
for further derivative-free schemes behind the same interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .rng import make_generator

METHODS = ("nelder_mead", "direct", "random")

DEFAULT_X_TOL = 1e-4
DEFAULT_F_TOL = 1e-6

# Reflection/expansion/contraction/shrink coefficients.
_NM_ALPHA, _NM_GAMMA, _NM_RHO, _NM_SIGMA = 1.0, 2.0, 0.5, 0.5

# DIRECT stops on f_tol once this many evaluations per dimension pass without
# improving the running best by more than f_tol (iteration cost grows with the
# partition, so the window is counted in evaluations, not iterations).
_DIRECT_STALL_EVALS_PER_DIM = 100

Objective = Callable[[np.ndarray], float]


@dataclass
class SearchBox:
    """Axis-aligned parameter bounds, one (lower, upper) pair per coordinate."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("bounds must be 1-D and of equal length")
        if not np.all(self.lower < self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")

    @classmethod
    def default(cls, dim: int) -> "SearchBox":
        """The angle box [0, 2*pi) per coordinate."""
        return cls(np.zeros(dim), np.full(dim, 2.0 * np.pi))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass
class OptimizerBudget:
    """Evaluation cap scaling * depth * graph_size, overridable directly."""

    p: int
    graph_size: int
    scaling: int = 200
    max_evaluations: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_evaluations is None:
            self.max_evaluations = self.scaling * self.p * self.graph_size
        if self.max_evaluations < 1:
            raise ValueError("budget must allow at least one evaluation")


@dataclass
class MinimizeResult:
    best_x: np.ndarray
    best_f: float
    evaluations: int
    termination_reason: str
    f_initial: float


class _BudgetExhausted(Exception):
    pass


class _CountingObjective:
    """Wraps the raw objective with exact call counting and running best."""

    def __init__(self, fn: Objective, max_evaluations: int):
        self.fn = fn
        self.max_evaluations = max_evaluations
        self.count = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf
        self.f_initial: Optional[float] = None

    def __call__(self, x: np.ndarray) -> float:
        if self.count >= self.max_evaluations:
            raise _BudgetExhausted
        self.count += 1
        x = np.asarray(x, dtype=np.float64)
        f = float(self.fn(x))
        if self.f_initial is None:
            self.f_initial = f
        if f < self.best_f:
            self.best_f = f
            self.best_x = x.copy()
        return f


@dataclass
class SimplexState:
    """Vertices and values of a Nelder-Mead simplex, unordered."""

    points: np.ndarray
    values: np.ndarray

    def diameter(self) -> float:
        spread = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.linalg.norm(spread))

    def value_spread(self) -> float:
        return float(self.values.max() - self.values.min())


def make_initial_simplex(x0: np.ndarray, box: SearchBox, fn: Objective, f0: float) -> SimplexState:
    """x0 plus a 10%-of-range step along each axis, stepped inward at walls."""
    dim = box.dim
    points = np.empty((dim + 1, dim))
    values = np.empty(dim + 1)
    points[0] = x0
    values[0] = f0
    steps = 0.1 * box.widths
    for i in range(dim):
        x = x0.copy()
        x[i] = x[i] + steps[i] if x[i] + steps[i] <= box.upper[i] else x[i] - steps[i]
        points[i + 1] = box.clip(x)
        values[i + 1] = fn(points[i + 1])
    return SimplexState(points, values)


def nelder_mead_step(state: SimplexState, fn: Objective, box: SearchBox) -> SimplexState:
    """One reflect/expand/contract/shrink iteration, proposals clamped to the box."""
    order = np.argsort(state.values, kind="stable")
    points = state.points[order]
    values = state.values[order]
    centroid = points[:-1].mean(axis=0)
    worst = points[-1]

    reflected = box.clip(centroid + _NM_ALPHA * (centroid - worst))
    f_reflected = fn(reflected)
    if values[0] <= f_reflected < values[-2]:
        points[-1], values[-1] = reflected, f_reflected
    elif f_reflected < values[0]:
        expanded = box.clip(centroid + _NM_GAMMA * (centroid - worst))
        f_expanded = fn(expanded)
        if f_expanded < f_reflected:
            points[-1], values[-1] = expanded, f_expanded
        else:
            points[-1], values[-1] = reflected, f_reflected
    else:
        contracted = box.clip(centroid + _NM_RHO * (worst - centroid))
        f_contracted = fn(contracted)
        if f_contracted < values[-1]:
            points[-1], values[-1] = contracted, f_contracted
        else:
            for i in range(1, points.shape[0]):
                points[i] = points[0] + _NM_SIGMA * (points[i] - points[0])
                values[i] = fn(points[i])
    state.points, state.values = points, values
    return state


def _minimize_nelder_mead(
    fn: _CountingObjective, x0: np.ndarray, box: SearchBox, f0: float, x_tol: float, f_tol: float
) -> str:
    state = make_initial_simplex(x0, box, fn, f0)
    while True:
        if state.value_spread() <= f_tol:
            return "f_tol"
        if state.diameter() <= x_tol:
            return "x_tol"
        nelder_mead_step(state, fn, box)


@dataclass
class DirectState:
    """Hyper-rectangle partition of the box; centers carry sampled values.

    splits[i] counts the trisections each rectangle has absorbed per axis, so
    edge lengths are widths / 3**splits exactly and the partition always
    tiles the box.
    """

    box: SearchBox
    centers: list = field(default_factory=list)
    splits: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def diameters(self) -> np.ndarray:
        widths = self.box.widths
        return np.array(
            [0.5 * np.linalg.norm(widths / np.power(3.0, s)) for s in self.splits]
        )

    def volume(self) -> float:
        widths = self.box.widths
        return float(sum(np.prod(widths / np.power(3.0, s)) for s in self.splits))


def make_initial_partition(box: SearchBox, fn: Objective) -> DirectState:
    state = DirectState(box)
    center = box.lower + 0.5 * box.widths
    state.centers.append(center)
    state.splits.append(np.zeros(box.dim, dtype=np.int64))
    state.values.append(fn(center))
    return state


def _potentially_optimal(state: DirectState) -> list[int]:
    """Lower convex hull over (diameter, value); returns rectangle indices."""
    d = np.round(state.diameters(), 12)
    f = np.asarray(state.values)
    reps: dict[float, int] = {}
    for idx in range(d.size):
        key = d[idx]
        if key not in reps or f[idx] < f[reps[key]]:
            reps[key] = idx
    pts = sorted(((key, f[idx], idx) for key, idx in reps.items()))
    hull: list[tuple[float, float, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (ox, oy, _), (ax, ay, _) = hull[-2], hull[-1]
            if (ax - ox) * (pt[1] - oy) - (ay - oy) * (pt[0] - ox) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    best = min(hull, key=lambda t: (t[1], -t[0]))
    chosen = [pt for pt in hull if pt[0] >= best[0]]
    out: list[int] = []
    for key, value, _ in chosen:
        out.extend(idx for idx in range(d.size) if d[idx] == key and f[idx] == value)
    return sorted(set(out))


def direct_step(state: DirectState, fn: Objective) -> DirectState:
    """Trisect every potentially-optimal rectangle along its longest side."""
    widths = state.box.widths
    for idx in _potentially_optimal(state):
        edges = widths / np.power(3.0, state.splits[idx])
        axis = int(np.argmax(edges))
        delta = edges[axis] / 3.0
        child_splits = state.splits[idx].copy()
        child_splits[axis] += 1
        for direction in (+1.0, -1.0):
            center = state.centers[idx].copy()
            center[axis] += direction * delta
            state.centers.append(center)
            state.splits.append(child_splits.copy())
            state.values.append(fn(center))
        state.splits[idx] = child_splits
    return state


def _minimize_direct(
    fn: _CountingObjective, x0: np.ndarray, box: SearchBox, x_tol: float, f_tol: float
) -> str:
    state = make_initial_partition(box, fn)
    window = _DIRECT_STALL_EVALS_PER_DIM * box.dim
    last_improvement_count = fn.count
    best_seen = fn.best_f
    while True:
        direct_step(state, fn)
        if best_seen - fn.best_f > f_tol:
            best_seen = fn.best_f
            last_improvement_count = fn.count
        if fn.count - last_improvement_count >= window:
            return "f_tol"
        if float(state.diameters().max()) <= x_tol:
            return "x_tol"


def _minimize_random(
    fn: _CountingObjective, box: SearchBox, seed: int | np.random.Generator
) -> str:
    rng = make_generator(seed)
    while True:
        fn(box.lower + rng.random(box.dim) * box.widths)


def minimize(
    objective: Objective,
    x0: np.ndarray,
    box: Optional[SearchBox] = None,
    budget: OptimizerBudget | int = 1000,
    method: str = "nelder_mead",
    tolerances: tuple[float, float] = (DEFAULT_X_TOL, DEFAULT_F_TOL),
    seed: int | np.random.Generator = 0,
) -> MinimizeResult:
    """Bounded derivative-free minimization with an exact evaluation cap.

    x0 is always evaluated first, so the result never exceeds objective(x0);
    the random baseline consumes the budget exactly and reports its running
    minimum.  Termination is one of budget / x_tol / f_tol.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if box is None:
        box = SearchBox.default(x0.size)
    if x0.shape != (box.dim,):
        raise ValueError("x0 dimension does not match the box")
    if not box.contains(x0):
        raise ValueError("x0 lies outside the search box")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; implemented methods: {METHODS}")
    max_evaluations = budget.max_evaluations if isinstance(budget, OptimizerBudget) else int(budget)
    if max_evaluations < 1:
        raise ValueError("budget must allow at least one evaluation")
    x_tol, f_tol = tolerances

    fn = _CountingObjective(objective, max_evaluations)
    try:
        f0 = fn(x0)
        if method == "nelder_mead":
            reason = _minimize_nelder_mead(fn, x0, box, f0, x_tol, f_tol)
        elif method == "direct":
            reason = _minimize_direct(fn, x0, box, x_tol, f_tol)
        else:
            reason = _minimize_random(fn, box, seed)
    except _BudgetExhausted:
        reason = "budget"
    assert fn.best_x is not None
    return MinimizeResult(
        best_x=fn.best_x,
        best_f=fn.best_f,
        evaluations=fn.count,
        termination_reason=reason,
        f_initial=float(fn.f_initial),
    )
