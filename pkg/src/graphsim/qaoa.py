"""QAOA iteration, the restricted-mixer variant, measurement, and trial metrics.

A depth-p iteration alternates the diagonal cost phase and the mixer
exponential, starting from the equal superposition.  The restricted-mixer
variant reverses the order within each layer and appends one extra mixing
step, which accounts for the non-trivial optimum a masked mixer introduces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import permutations
from .evolution import ExpmWorkspace, apply_phase, expm_action
from .hamiltonians import CostDiagonal, MixerMatrix
from .rng import make_generator


@dataclass
class QaoaParams:
    """Phase/mixing angles for a depth-p iteration.

    extra_beta is the trailing mixing angle of the restricted-mixer variant
    and must be absent for the standard iteration.
    """

    gammas: np.ndarray
    betas: np.ndarray
    extra_beta: Optional[float] = None

    def __post_init__(self) -> None:
        self.gammas = np.atleast_1d(np.asarray(self.gammas, dtype=np.float64))
        self.betas = np.atleast_1d(np.asarray(self.betas, dtype=np.float64))
        if self.gammas.size != self.betas.size or self.gammas.size < 1:
            raise ValueError("gammas and betas must have the same length p >= 1")

    @property
    def p(self) -> int:
        return self.gammas.size

    @classmethod
    def from_vector(cls, x: np.ndarray, extra_beta: Optional[float] = None) -> "QaoaParams":
        """Split a flat optimizer vector [gamma_1..gamma_p, beta_1..beta_p]."""
        x = np.asarray(x, dtype=np.float64)
        if x.size % 2 != 0 or x.size < 2:
            raise ValueError("parameter vector must have even length 2p")
        p = x.size // 2
        return cls(x[:p], x[p:], extra_beta)


def initial_state(q: int) -> np.ndarray:
    """Equal superposition: 2**q amplitudes of 1/sqrt(2**q)."""
    if q < 1:
        raise ValueError("need q >= 1")
    n = 1 << q
    return np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128)


def _check_dimensions(diag: CostDiagonal, m: MixerMatrix) -> None:
    if len(diag) != m.dimension:
        raise ValueError(f"diagonal length {len(diag)} does not match mixer dimension {m.dimension}")


def evolve(
    params: QaoaParams,
    diag: CostDiagonal,
    m: MixerMatrix,
    workspace: Optional[ExpmWorkspace] = None,
) -> np.ndarray:
    """Standard iteration: p layers of cost phase followed by mixer action."""
    if params.extra_beta is not None:
        raise ValueError("extra_beta belongs to the restricted-mixer variant; use evolve_npo")
    _check_dimensions(diag, m)
    ws = workspace if workspace is not None else ExpmWorkspace()
    psi = initial_state(diag.q)
    for gamma, beta in zip(params.gammas, params.betas):
        psi = apply_phase(diag, gamma, psi, out=psi)
        psi = expm_action(m, beta, psi, workspace=ws)
    return psi


def evolve_npo(
    params: QaoaParams,
    diag: CostDiagonal,
    m: MixerMatrix,
    workspace: Optional[ExpmWorkspace] = None,
) -> np.ndarray:
    """Restricted-mixer iteration: mixer before phase each layer, plus a
    trailing mixer step with extra_beta."""
    if params.extra_beta is None:
        raise ValueError("restricted-mixer evolution needs extra_beta")
    _check_dimensions(diag, m)
    ws = workspace if workspace is not None else ExpmWorkspace()
    psi = initial_state(diag.q)
    for gamma, beta in zip(params.gammas, params.betas):
        psi = expm_action(m, beta, psi, workspace=ws)
        psi = apply_phase(diag, gamma, psi, out=psi)
    return expm_action(m, float(params.extra_beta), psi, workspace=ws)


def _expectation_of(psi: np.ndarray, values: np.ndarray) -> float:
    probabilities = psi.real * psi.real + psi.imag * psi.imag
    return float(probabilities @ values)


def expectation(psi: np.ndarray, diag: CostDiagonal) -> float:
    """Probability-weighted mean cost sum_x |psi_x|^2 * diag[x]."""
    psi = np.asarray(psi)
    if psi.shape != diag.values.shape:
        raise ValueError("state and diagonal lengths differ")
    return _expectation_of(psi, diag.values)


def sample(psi: np.ndarray, n: int, seed: int | np.random.Generator) -> np.ndarray:
    """n i.i.d. bit-string indices drawn from |psi|^2 by inverse CDF."""
    if n < 1:
        raise ValueError("need at least one sample")
    psi = np.asarray(psi)
    probabilities = psi.real * psi.real + psi.imag * psi.imag
    cdf = np.cumsum(probabilities)
    rng = make_generator(seed)
    draws = rng.random(n) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, draws, side="right"), psi.size - 1)


def cost_distribution(psi: np.ndarray, diag: CostDiagonal) -> dict[float, float]:
    """Total measurement probability per distinct cost value, ascending."""
    psi = np.asarray(psi)
    if psi.shape != diag.values.shape:
        raise ValueError("state and diagonal lengths differ")
    probabilities = psi.real * psi.real + psi.imag * psi.imag
    keys, inverse = np.unique(diag.values, return_inverse=True)
    totals = np.bincount(inverse, weights=probabilities, minlength=keys.size)
    return {float(k): float(t) for k, t in zip(keys, totals) if t != 0.0}


@dataclass
class Metrics:
    """Per-trial quality measures, all on the minimization scale."""

    evaluations: int
    sample_error: float
    expectation_error: float
    classical_comparison: float
    expectation_improvement: float
    infeasible_sample_fraction: float

    def __post_init__(self) -> None:
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")
        if not 0.0 <= self.infeasible_sample_fraction <= 1.0:
            raise ValueError("infeasible_sample_fraction must lie in [0, 1]")


def compute_metrics(
    diag: CostDiagonal,
    final_psi: np.ndarray,
    d_min: int,
    evaluations: int,
    f_initial: float,
    num_samples: int,
    seed: int | np.random.Generator,
) -> Metrics:
    """Score a finished trial against the brute-force optimum d_min.

    sample_error is the excess of the best feasibly-sampled cost over d_min
    (lower is better); tail-string draws are excluded from it and reported as
    infeasible_sample_fraction instead, since the encoding maps them to the
    optimal-looking cost zero.  When every sample lands in the tail the best
    observed cost falls back to the worst feasible bound N_slots so the
    metric stays finite.  f_initial must already be on the minimization
    scale, as produced by the optimizer objective.
    """
    if diag.num_vertices is None or diag.num_slots is None:
        raise ValueError("diagonal lacks graph provenance (num_vertices/num_slots)")
    costs = diag.minimization_values()
    f_final = _expectation_of(np.asarray(final_psi), costs)
    feasible_count = permutations.factorial(diag.num_vertices)

    draws = sample(final_psi, num_samples, seed)
    feasible = draws < feasible_count
    if np.any(feasible):
        best_sampled = float(costs[draws[feasible]].min())
    else:
        best_sampled = float(diag.num_slots)
    uniform = initial_state(diag.q)
    return Metrics(
        evaluations=evaluations,
        sample_error=best_sampled - d_min,
        expectation_error=abs(f_final - d_min) / diag.num_slots,
        classical_comparison=f_final - _expectation_of(uniform, costs),
        expectation_improvement=f_initial - f_final,
        infeasible_sample_fraction=float(np.count_nonzero(~feasible)) / draws.size,
    )
