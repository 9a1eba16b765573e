"""Problem and mixer operators for the compact graph-similarity encoding.

The problem operator is a length-2**q diagonal of cost values: index k < V!
holds the edge difference under the k-th lexicographic relabeling, tail
indices hold the mode's padding value.  The mixer is the q-dimensional
hypercube adjacency (bit-flip transitions), stored compressed-sparse-column,
optionally restricted by a feasibility mask.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse

from . import graphs, permutations

COST_MODES = ("edge_difference", "alternate_penalty")

# 2**q complex amplitudes at q=24 already cost 256 MiB; refuse beyond that.
MAX_QUBITS = 24

_CACHE_MAGIC = b"QCD1"
_CACHE_HEADER = struct.Struct("<4sIB")

FeasibilityMask = Callable[[int], bool]


@dataclass
class CostDiagonal:
    """Diagonal of the problem operator over all 2**q bit-strings."""

    values: np.ndarray
    q: int
    mode: str
    num_vertices: Optional[int] = None
    num_slots: Optional[int] = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.mode not in COST_MODES:
            raise ValueError(f"unknown cost mode {self.mode!r}; choose from {COST_MODES}")
        if self.values.shape != (1 << self.q,):
            raise ValueError(f"diagonal length {self.values.shape} != 2**{self.q}")

    def __len__(self) -> int:
        return self.values.size

    def minimization_values(self) -> np.ndarray:
        """Costs on the minimized scale shared by both modes (lower is better)."""
        return self.values if self.mode == "edge_difference" else -self.values


def build_cost_diagonal(
    g1: graphs.Graph,
    g2: graphs.Graph,
    mode: str = "edge_difference",
    *,
    cap: int = graphs.BRUTE_FORCE_CAP,
    max_q: int = MAX_QUBITS,
) -> CostDiagonal:
    """Evaluate the edge-difference cost for every feasible index.

    edge_difference mode stores the difference d directly and pads the tail
    with zero; alternate_penalty stores -d and pads with the maximal penalty
    -N_slots.
    """
    if mode not in COST_MODES:
        raise ValueError(f"unknown cost mode {mode!r}; choose from {COST_MODES}")
    g1, g2 = graphs.pad_to_common_size(g1, g2)
    v = g1.num_vertices
    if v < 1:
        raise ValueError("cost diagonal needs V >= 1")
    q = permutations.qubit_count(v)
    if q > max_q:
        raise ValueError(f"q={q} exceeds maximum {max_q}")
    sweep = graphs.edge_difference_sweep(g1, g2, cap=cap).astype(np.float64)
    n_slots = g1.num_slots
    values = np.zeros(1 << q, dtype=np.float64)
    if mode == "edge_difference":
        values[: sweep.size] = sweep
    else:
        values[: sweep.size] = -sweep
        values[sweep.size :] = -float(n_slots)
    return CostDiagonal(values, q, mode, num_vertices=v, num_slots=n_slots)


@dataclass
class MixerMatrix:
    """Hypercube-adjacency mixer in compressed-sparse-column form.

    Entries are all 1; an entry at (r, c) means bit-strings r and c differ in
    exactly one bit (and, when masked, that both are feasible).
    """

    q: int
    column_pointers: np.ndarray
    row_indices: np.ndarray
    values: np.ndarray
    masked: bool = False
    _csc: Optional[scipy.sparse.csc_matrix] = field(default=None, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return 1 << self.q

    @property
    def nnz(self) -> int:
        return self.row_indices.size

    def as_csc(self) -> scipy.sparse.csc_matrix:
        """Complex-valued scipy view used by the evolution kernels."""
        if self._csc is None:
            n = self.dimension
            self._csc = scipy.sparse.csc_matrix(
                (self.values.astype(np.complex128), self.row_indices, self.column_pointers),
                shape=(n, n),
            )
        return self._csc

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dimension, self.dimension))
        for c in range(self.dimension):
            lo, hi = self.column_pointers[c], self.column_pointers[c + 1]
            dense[self.row_indices[lo:hi], c] = self.values[lo:hi]
        return dense


def build_mixer(
    q: int,
    mask: Optional[FeasibilityMask] = None,
    *,
    max_q: int = MAX_QUBITS,
) -> MixerMatrix:
    """Hypercube mixer on 2**q bit-strings, optionally masked.

    Unmasked, every column c holds the q neighbours c XOR (1 << j); with a
    mask, entry (r, c) survives only if mask(r) and mask(c) both hold, which
    keeps the matrix symmetric.
    """
    if q < 1:
        raise ValueError("mixer needs q >= 1")
    if q > max_q:
        raise ValueError(f"q={q} exceeds maximum {max_q}")
    n = 1 << q
    neighbours = np.arange(n, dtype=np.int64)[:, None] ^ (1 << np.arange(q, dtype=np.int64))[None, :]
    neighbours.sort(axis=1)
    if mask is None:
        row_indices = neighbours.ravel().astype(np.int32)
        column_pointers = np.arange(0, n * q + 1, q, dtype=np.int64)
        masked = False
    else:
        feasible = np.fromiter((bool(mask(i)) for i in range(n)), dtype=bool, count=n)
        keep = feasible[neighbours] & feasible[:, None]
        column_pointers = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(keep.sum(axis=1), out=column_pointers[1:])
        row_indices = neighbours[keep].astype(np.int32)
        masked = True
    values = np.ones(row_indices.size, dtype=np.float64)
    return MixerMatrix(q, column_pointers, row_indices, values, masked=masked)


def eigen_bounds(m: MixerMatrix) -> tuple[float, float]:
    """Spectral bounds (-q, +q).

    Exact for the unmasked hypercube; for masked mixers (fewer nonzeros per
    row) it is a safe over-estimate, which costs Chebyshev terms, not
    accuracy.
    """
    return -float(m.q), float(m.q)


def save_cost_diagonal(diag: CostDiagonal, path) -> None:
    """Binary cache: magic 'QCD1', q (uint32 LE), mode byte, 2**q float64 LE."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(_CACHE_MAGIC, diag.q, COST_MODES.index(diag.mode)))
        fh.write(diag.values.astype("<f8").tobytes())


def load_cost_diagonal(path) -> CostDiagonal:
    with open(path, "rb") as fh:
        header = fh.read(_CACHE_HEADER.size)
        if len(header) != _CACHE_HEADER.size:
            raise ValueError("truncated cost-diagonal cache header")
        magic, q, mode_byte = _CACHE_HEADER.unpack(header)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"bad cache magic {magic!r}")
        if mode_byte >= len(COST_MODES):
            raise ValueError(f"bad cache mode byte {mode_byte}")
        data = np.frombuffer(fh.read((1 << q) * 8), dtype="<f8")
        if data.size != 1 << q:
            raise ValueError("truncated cost-diagonal cache body")
    return CostDiagonal(data.astype(np.float64), q, COST_MODES[mode_byte])
