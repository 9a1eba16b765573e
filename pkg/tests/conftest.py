import numpy as np
import pytest

from graphsim.graphs import Graph


def _graph_from_edges(v: int, edges, directed=True) -> Graph:
    adj = np.zeros((v, v), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = 1
        if not directed:
            adj[j, i] = 1
    return Graph(v, directed, adj)


@pytest.fixture
def four_vertex_pair():
    """Two directed 4-vertex graphs that differ in exactly two of the 16 slots
    under the identity alignment (drawn side by side, the classic similarity
    0.875 example)."""
    g1 = _graph_from_edges(4, [(0, 1), (0, 2), (2, 1), (1, 3)])
    g2 = _graph_from_edges(4, [(0, 1), (0, 2), (1, 3), (3, 2)])
    return g1, g2


@pytest.fixture
def graph_from_edges():
    return _graph_from_edges
