"""Factoradic (Lehmer-code) permutation unranking and compact-encoding analytics.

The compact encoding indexes the V! vertex relabelings of a graph pair with
q = ceil(log2(V!)) qubits.  Bit-string indices below V! decode to permutations
in lexicographic order; the remaining "tail" indices encode nothing.
"""

from __future__ import annotations

import math

import numpy as np

# Largest order whose factorial fits an unsigned 64-bit integer; larger graphs
# are rejected long before this by state-vector size anyway.
MAX_ORDER = 20


def factorial(n: int) -> int:
    """n! for 0 <= n <= MAX_ORDER; raises ValueError outside that range."""
    if n < 0 or n > MAX_ORDER:
        raise ValueError(f"factorial order {n} outside supported range [0, {MAX_ORDER}]")
    return math.factorial(n)


def qubit_count(num_vertices: int) -> int:
    """Smallest q with 2**q >= V!, the register width of the compact encoding."""
    if num_vertices < 1:
        raise ValueError("vertex count must be >= 1")
    return (factorial(num_vertices) - 1).bit_length()


def kth_permutation(n: int, k: int) -> np.ndarray:
    """Return the k-th permutation of [0, n) in lexicographic order.

    k=0 is the identity, k=n!-1 the full reversal.  Raises ValueError for
    infeasible k (k >= n!).
    """
    if not is_feasible(k, n):
        raise ValueError(f"permutation index {k} infeasible for order {n} (needs k < {n}!)")
    items = list(range(n))
    out = np.empty(n, dtype=np.int64)
    for pos in range(n):
        f = factorial(n - 1 - pos)
        i, k = divmod(k, f)
        out[pos] = items.pop(i)
    return out


def is_feasible(k: int, num_vertices: int) -> bool:
    """True iff bit-string index k decodes to a permutation (k < V!)."""
    return 0 <= k < factorial(num_vertices)


def tail_stats(num_vertices: int) -> tuple[int, float]:
    """(tail_count, tail_over_feasible) for the compact encoding at V vertices.

    tail_count = 2**q - V! is the number of indices that decode to no
    permutation; the ratio divides that by the V! feasible indices.
    """
    if num_vertices < 2:
        raise ValueError("tail statistics need V >= 2")
    fact = factorial(num_vertices)
    tail = (1 << qubit_count(num_vertices)) - fact
    return tail, tail / fact
