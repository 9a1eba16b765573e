"""State-evolution kernels: diagonal phase rotation and Chebyshev expm-action.

The mixer exponential e^{-i beta B} acting on a state is expanded as

    sum_{n>=0} (2 - delta_{n0}) (-i)^n J_n(beta*q) T_n(B/q) psi,

where T_n follows the two-term Chebyshev recurrence on vectors and J_n are
Bessel functions of the first kind.  With the hypercube spectral bounds
+-q the scaling midpoint is zero and no prefactor appears.  The series is
truncated at the first n > |beta*q| whose coefficient magnitude drops below
1e-18; a dense scaling-and-squaring exponential is provided as the
independent test oracle.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .hamiltonians import CostDiagonal, MixerMatrix

# Verbatim series tolerance; far below double rounding for O(1) coefficients,
# harmless because the coefficients decay super-exponentially past n ~ |beta*q|.
CHEBYSHEV_EPSILON = 1e-18

# Extra iterations allowed past the turning point before declaring failure.
CHEBYSHEV_CEILING_MARGIN = 1000

_RESCALE_THRESHOLD = 1e250
_RESCALE_FACTOR = 2.0**-832  # power of two, so rescaling is exact

# Above this argument the plain recurrence accumulates enough rounding to
# threaten the 1e-13 contract; switch to the compensated core.
_COMPENSATED_THRESHOLD = 500.0

_MINUS_I_POWERS = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    return s, b - (s - a)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ca = _SPLITTER * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = _SPLITTER * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    return p, ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo


def _dd_add(a_hi: float, a_lo: float, b_hi: float, b_lo: float) -> tuple[float, float]:
    s, e = _two_sum(a_hi, b_hi)
    return _quick_two_sum(s, e + a_lo + b_lo)


def _dd_mul(a_hi: float, a_lo: float, b_hi: float, b_lo: float) -> tuple[float, float]:
    p, e = _two_prod(a_hi, b_hi)
    return _quick_two_sum(p, e + a_hi * b_lo + a_lo * b_hi)


class ConvergenceError(RuntimeError):
    """Chebyshev series failed to reach the tolerance within the iteration cap."""


def apply_phase(diag: CostDiagonal, gamma: float, psi: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
    """Pointwise diagonal phase evolution: amplitude_x *= exp(-i*gamma*cost_x)."""
    psi = np.asarray(psi)
    if psi.shape != diag.values.shape:
        raise ValueError(f"state length {psi.shape} does not match diagonal {diag.values.shape}")
    phases = np.exp(-1j * gamma * diag.values)
    if out is None:
        return psi * phases
    np.multiply(psi, phases, out=out)
    return out


def _miller_start(n_max: int, ax: float) -> int:
    top = max(n_max, int(math.ceil(ax)))
    return top + int(3.0 * math.sqrt(top + 1)) + 40


def _bessel_sequence_plain(n_max: int, ax: float) -> np.ndarray:
    out = np.zeros(n_max + 1)
    start = _miller_start(n_max, ax)
    f_above = 0.0
    f = 1e-250
    even_total = f if start % 2 == 0 else 0.0
    for m in range(start, 0, -1):
        f_below = (2.0 * m / ax) * f - f_above
        f_above, f = f, f_below
        if abs(f) > _RESCALE_THRESHOLD:
            f *= _RESCALE_FACTOR
            f_above *= _RESCALE_FACTOR
            even_total *= _RESCALE_FACTOR
            out *= _RESCALE_FACTOR
        idx = m - 1
        if idx <= n_max:
            out[idx] = f
        if idx % 2 == 0:
            even_total += f
    out /= 2.0 * even_total - out[0]
    return out


def _bessel_sequence_compensated(n_max: int, ax: float) -> np.ndarray:
    """Same recurrence in double-double arithmetic for large arguments, where
    the ~|x| marginally-stable steps would otherwise accumulate rounding."""
    out_hi = np.zeros(n_max + 1)
    out_lo = np.zeros(n_max + 1)
    start = _miller_start(n_max, ax)
    fa_hi = fa_lo = 0.0
    f_hi, f_lo = 1e-250, 0.0
    tot_hi, tot_lo = (f_hi, 0.0) if start % 2 == 0 else (0.0, 0.0)
    for m in range(start, 0, -1):
        two_m = float(2 * m)
        c_hi = two_m / ax
        p, e = _two_prod(c_hi, ax)
        c_lo = ((two_m - p) - e) / ax
        t_hi, t_lo = _dd_mul(c_hi, c_lo, f_hi, f_lo)
        f_hi, f_lo, fa_hi, fa_lo = *_dd_add(t_hi, t_lo, -fa_hi, -fa_lo), f_hi, f_lo
        if abs(f_hi) > _RESCALE_THRESHOLD:
            f_hi *= _RESCALE_FACTOR
            f_lo *= _RESCALE_FACTOR
            fa_hi *= _RESCALE_FACTOR
            fa_lo *= _RESCALE_FACTOR
            tot_hi *= _RESCALE_FACTOR
            tot_lo *= _RESCALE_FACTOR
            out_hi *= _RESCALE_FACTOR
            out_lo *= _RESCALE_FACTOR
        idx = m - 1
        if idx <= n_max:
            out_hi[idx] = f_hi
            out_lo[idx] = f_lo
        if idx % 2 == 0:
            tot_hi, tot_lo = _dd_add(tot_hi, tot_lo, f_hi, f_lo)
    norm_hi, norm_lo = _dd_add(2.0 * tot_hi, 2.0 * tot_lo, -out_hi[0], -out_lo[0])
    return (out_hi + out_lo) / (norm_hi + norm_lo)


def _bessel_sequence(n_max: int, x: float) -> np.ndarray:
    """J_0(x)..J_{n_max}(x) by downward Miller recurrence with normalization.

    The recurrence runs from well past max(n_max, |x|) so the dominant
    solution (J) swamps the arbitrary seed; the result is normalized with
    J_0 + 2*sum_k J_{2k} = 1.  Odd orders pick up (-1)^n for negative x, so
    the reflection symmetry holds exactly by construction.
    """
    ax = abs(x)
    if ax == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if ax <= _COMPENSATED_THRESHOLD:
        out = _bessel_sequence_plain(n_max, ax)
    else:
        out = _bessel_sequence_compensated(n_max, ax)
    if x < 0:
        out[1::2] *= -1.0
    return out


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for integer n >= 0."""
    if n < 0:
        raise ValueError("order must be >= 0")
    return float(_bessel_sequence(n, float(x))[n])


class ExpmWorkspace:
    """Reusable buffers for the Chebyshev recurrence.

    Passing the same workspace to repeated expm_action calls of one dimension
    keeps the recurrence vectors allocation-free; last_term_count reports how
    many series terms the most recent call accumulated.
    """

    def __init__(self) -> None:
        self._dim = -1
        self.last_term_count = 0

    def buffers(self, dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if self._dim != dim:
            self._prev = np.empty(dim, dtype=np.complex128)
            self._cur = np.empty(dim, dtype=np.complex128)
            self._scratch = np.empty(dim, dtype=np.complex128)
            self._acc = np.empty(dim, dtype=np.complex128)
            self._dim = dim
        return self._prev, self._cur, self._scratch, self._acc


def _chebyshev_cutoff(alpha: float, ceiling: int) -> tuple[int, np.ndarray]:
    """Smallest n > |alpha| with |2 J_n(alpha)| <= epsilon, plus the J table."""
    a_abs = abs(alpha)
    n_hi = min(int(math.ceil(a_abs)) + 60, ceiling)
    while True:
        js = _bessel_sequence(n_hi, alpha)
        orders = np.arange(n_hi + 1)
        hits = np.flatnonzero((orders > a_abs) & (np.abs(2.0 * js) <= CHEBYSHEV_EPSILON))
        if hits.size:
            return int(hits[0]), js
        if n_hi >= ceiling:
            raise ConvergenceError(
                f"Chebyshev series did not reach {CHEBYSHEV_EPSILON} within {ceiling} terms (alpha={alpha})"
            )
        n_hi = min(n_hi + 200, ceiling)


def expm_action(
    m: MixerMatrix,
    beta: float,
    psi: np.ndarray,
    workspace: Optional[ExpmWorkspace] = None,
) -> np.ndarray:
    """Apply e^{-i*beta*B} to psi without materializing the exponential."""
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta}")
    psi = np.asarray(psi, dtype=np.complex128)
    n = m.dimension
    if psi.shape != (n,):
        raise ValueError(f"state length {psi.shape} does not match mixer dimension {n}")
    ws = workspace if workspace is not None else ExpmWorkspace()
    if beta == 0.0:
        ws.last_term_count = 1
        return psi.copy()

    alpha = beta * m.q
    ceiling = int(math.ceil(abs(alpha))) + CHEBYSHEV_CEILING_MARGIN
    cutoff, js = _chebyshev_cutoff(alpha, ceiling)

    csc = m.as_csc()
    inv_q = 1.0 / m.q
    prev, cur, scratch, acc = ws.buffers(n)

    np.multiply(psi, js[0], out=acc)
    prev[:] = psi
    np.multiply(csc @ psi, inv_q, out=cur)
    if cutoff > 1:
        np.multiply(cur, 2.0 * _MINUS_I_POWERS[1] * js[1], out=scratch)
        acc += scratch
    for order in range(2, cutoff):
        y = csc @ cur
        np.multiply(y, 2.0 * inv_q, out=scratch)
        scratch -= prev
        np.multiply(scratch, 2.0 * _MINUS_I_POWERS[order % 4] * js[order], out=y)
        acc += y
        prev, cur, scratch = cur, scratch, prev
    ws.last_term_count = cutoff
    return acc.copy()


def dense_expm_oracle(a: np.ndarray, max_dim: int = 1 << 10) -> np.ndarray:
    """Dense e^A by scaling and squaring with a 20-term Taylor core (test oracle).

    The scaling factor is the smallest power of two bringing the 1-norm at or
    below 1, after which the Taylor remainder is ~1/20! per squaring step.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    dim = a.shape[0]
    if dim > max_dim:
        raise ValueError(f"dimension {dim} exceeds oracle cap {max_dim}")
    norm1 = float(np.abs(a).sum(axis=0).max())
    squarings = 0
    while norm1 / (1 << squarings) > 1.0:
        squarings += 1
    x = a / (1 << squarings)
    eye = np.eye(dim, dtype=np.complex128)
    total = eye.copy()
    term = eye.copy()
    for k in range(1, 20):
        term = term @ x / k
        total += term
    for _ in range(squarings):
        total = total @ total
    return total
