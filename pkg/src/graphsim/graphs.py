"""Graphs, random generation, deformations, and the brute-force overlap oracle.

Graphs are dense adjacency bit-matrices.  Directed graphs compare all V**2
ordered slots (self-edges permitted); undirected graphs compare the V(V-1)/2
unordered slots above the diagonal.  Similarity between two graphs is
1 - d_min / N_slots where d_min is the minimal edge difference over all
vertex relabelings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import permutations
from .rng import make_generator

DEFORMATIONS = ("isomorphism", "vertical_flip", "add_edges", "remove_edges", "add_remove")

# Exhaustive search over V! relabelings; beyond this the sweep is infeasible
# on a desktop and callers must raise, not wait.
BRUTE_FORCE_CAP = 10

_SWEEP_CHUNK = 200_000


@dataclass
class Graph:
    """Unweighted graph as a V x V adjacency bit-matrix (entry (i,j) = edge i->j)."""

    num_vertices: int
    directed: bool
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=np.uint8)
        if adj.shape != (self.num_vertices, self.num_vertices):
            raise ValueError(f"adjacency shape {adj.shape} does not match V={self.num_vertices}")
        if np.any(adj > 1):
            raise ValueError("adjacency entries must be 0 or 1")
        if not self.directed:
            if np.any(adj != adj.T):
                raise ValueError("undirected adjacency must be symmetric")
            if np.any(np.diag(adj) != 0):
                raise ValueError("undirected graphs have no self-edges")
        self.adjacency = adj

    @property
    def num_slots(self) -> int:
        """Admissible edge slots: V**2 directed, V(V-1)/2 undirected."""
        v = self.num_vertices
        return v * v if self.directed else v * (v - 1) // 2

    def edge_count(self) -> int:
        if self.directed:
            return int(self.adjacency.sum())
        return int(np.triu(self.adjacency, 1).sum())

    def copy(self) -> "Graph":
        return Graph(self.num_vertices, self.directed, self.adjacency.copy())


def erdos_renyi(num_vertices: int, directed: bool, seed: int | np.random.Generator) -> Graph:
    """Random graph with every admissible slot filled independently at p=1/2."""
    if num_vertices < 0:
        raise ValueError("vertex count must be >= 0")
    rng = make_generator(seed)
    v = num_vertices
    if directed:
        adj = (rng.random((v, v)) < 0.5).astype(np.uint8)
    else:
        adj = np.zeros((v, v), dtype=np.uint8)
        iu, ju = np.triu_indices(v, k=1)
        draws = (rng.random(iu.size) < 0.5).astype(np.uint8)
        adj[iu, ju] = draws
        adj[ju, iu] = draws
    return Graph(v, directed, adj)


def _slot_indices(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of every admissible slot, in row-major order."""
    v = g.num_vertices
    if g.directed:
        rows, cols = np.indices((v, v))
        return rows.ravel(), cols.ravel()
    return np.triu_indices(v, k=1)


def deform(g: Graph, kind: str, seed: int | np.random.Generator) -> Graph:
    """Derive a test-case partner from g.

    isomorphism copies g; vertical_flip relabels vertex i to V-1-i; the edge
    deformations add/remove V uniformly-chosen slots (clamped to however many
    are available).  add_remove draws additions before removals from disjoint
    slot sets, so an added edge is never immediately removed.
    """
    if kind not in DEFORMATIONS:
        raise ValueError(f"unknown deformation {kind!r}; choose from {DEFORMATIONS}")
    if kind == "isomorphism":
        return g.copy()
    if kind == "vertical_flip":
        return Graph(g.num_vertices, g.directed, g.adjacency[::-1, ::-1].copy())

    rng = make_generator(seed)
    adj = g.adjacency.copy()
    rows, cols = _slot_indices(g)
    present = adj[rows, cols] == 1

    def flip(slot_mask: np.ndarray, value: int) -> None:
        candidates = np.flatnonzero(slot_mask)
        take = min(g.num_vertices, candidates.size)
        if take == 0:
            return
        chosen = candidates[rng.choice(candidates.size, size=take, replace=False)]
        adj[rows[chosen], cols[chosen]] = value
        if not g.directed:
            adj[cols[chosen], rows[chosen]] = value

    if kind in ("add_edges", "add_remove"):
        flip(~present, 1)
    if kind in ("remove_edges", "add_remove"):
        flip(present, 0)  # drawn from g's original edges, disjoint from additions
    return Graph(g.num_vertices, g.directed, adj)


def _check_comparable(g1: Graph, g2: Graph) -> None:
    if g1.directed != g2.directed:
        raise ValueError("cannot compare directed with undirected graphs")
    if g1.num_vertices != g2.num_vertices:
        raise ValueError(f"vertex counts differ ({g1.num_vertices} vs {g2.num_vertices})")


def pad_to_common_size(g1: Graph, g2: Graph) -> tuple[Graph, Graph]:
    """Pad the smaller graph with degenerate unconnected vertices."""
    if g1.directed != g2.directed:
        raise ValueError("cannot compare directed with undirected graphs")
    v = max(g1.num_vertices, g2.num_vertices)

    def pad(g: Graph) -> Graph:
        if g.num_vertices == v:
            return g
        adj = np.zeros((v, v), dtype=np.uint8)
        adj[: g.num_vertices, : g.num_vertices] = g.adjacency
        return Graph(v, g.directed, adj)

    return pad(g1), pad(g2)


def edge_difference(g1: Graph, g2: Graph, perm: np.ndarray) -> int:
    """Number of admissible slots (i,j) where g1(i,j) != g2(perm(i),perm(j))."""
    _check_comparable(g1, g2)
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (g1.num_vertices,) or np.any(np.sort(perm) != np.arange(g1.num_vertices)):
        raise ValueError("perm must be a permutation of [0, V)")
    mapped = g2.adjacency[np.ix_(perm, perm)]
    diff = g1.adjacency != mapped
    if not g1.directed:
        diff = np.triu(diff, 1)
    return int(diff.sum())


def _permutation_chunks(v: int):
    it = itertools.permutations(range(v))
    while True:
        block = list(itertools.islice(it, _SWEEP_CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def edge_difference_sweep(g1: Graph, g2: Graph, cap: int = BRUTE_FORCE_CAP) -> np.ndarray:
    """Edge differences for all V! relabelings, indexed in lexicographic order.

    Entry k equals edge_difference(g1, g2, kth_permutation(V, k)); the sweep
    is chunked so peak memory stays modest even at the cap.
    """
    _check_comparable(g1, g2)
    v = g1.num_vertices
    if v > cap:
        raise ValueError(f"V={v} exceeds brute-force cap {cap}")
    if v == 0:
        return np.zeros(1, dtype=np.int64)
    a1 = g1.adjacency
    a2 = g2.adjacency
    if not g1.directed:
        slot_mask = np.triu(np.ones((v, v), dtype=bool), 1)
    out = np.empty(permutations.factorial(v), dtype=np.int64)
    offset = 0
    for perms in _permutation_chunks(v):
        mapped = a2[perms[:, :, None], perms[:, None, :]]
        diff = mapped != a1[None, :, :]
        if not g1.directed:
            diff &= slot_mask[None, :, :]
        out[offset : offset + perms.shape[0]] = diff.sum(axis=(1, 2))
        offset += perms.shape[0]
    return out


def brute_force_best(g1: Graph, g2: Graph, cap: int = BRUTE_FORCE_CAP) -> tuple[np.ndarray, int]:
    """Exhaustive minimum edge difference over all V! relabelings.

    Ties break toward the lowest lexicographic permutation index, so the
    oracle is deterministic.  Unequal vertex counts are padded first.
    """
    g1, g2 = pad_to_common_size(g1, g2)
    sweep = edge_difference_sweep(g1, g2, cap=cap)
    k = int(np.argmin(sweep))
    return permutations.kth_permutation(g1.num_vertices, k), int(sweep[k])


def similarity(g1: Graph, g2: Graph, cap: int = BRUTE_FORCE_CAP) -> float:
    """Whole-graph similarity 1 - d_min / N_slots, in [0, 1]."""
    g1, g2 = pad_to_common_size(g1, g2)
    _, d_min = brute_force_best(g1, g2, cap=cap)
    if g1.num_slots == 0:
        return 1.0
    return 1.0 - d_min / g1.num_slots


def parse_graph_text(text: str) -> Graph:
    """Parse the fixture format: 'V directed|undirected' then V rows of 0/1."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph text")
    head = lines[0].split()
    if len(head) != 2 or head[1] not in ("directed", "undirected"):
        raise ValueError("header must be 'V directed|undirected'")
    v = int(head[0])
    if len(lines) != v + 1:
        raise ValueError(f"expected {v} adjacency rows, found {len(lines) - 1}")
    adj = np.zeros((v, v), dtype=np.uint8)
    for i, row in enumerate(lines[1:]):
        if len(row) != v or set(row) - {"0", "1"}:
            raise ValueError(f"row {i} must be {v} characters of 0/1")
        adj[i] = [int(c) for c in row]
    return Graph(v, head[1] == "directed", adj)


def format_graph_text(g: Graph) -> str:
    head = f"{g.num_vertices} {'directed' if g.directed else 'undirected'}"
    rows = ("".join(str(int(x)) for x in row) for row in g.adjacency)
    return "\n".join([head, *rows]) + "\n"


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def save_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph_text(g))
