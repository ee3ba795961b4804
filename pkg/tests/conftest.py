import numpy as np
import pytest

from thermograph.graph_core import LoadedGraph, build_graph

CORPUS_SEED = 20260813
CORPUS_SIZE = 200


def random_connected_graph(rng: np.random.Generator) -> LoadedGraph:
    """Random strongly connected loaded graph with <= 8 vertices.

    A Hamilton cycle over a shuffled vertex order guarantees strong
    connectivity; extra edges appear with probability ~0.25 and weights
    are uniform in [0.1, 2].
    """
    n = int(rng.integers(3, 9))
    order = rng.permutation(np.arange(1, n + 1))
    edges = {}
    for i in range(n):
        u, t = int(order[i]), int(order[(i + 1) % n])
        edges[(u, t)] = float(rng.uniform(0.1, 2.0))
    for u in range(1, n + 1):
        for t in range(1, n + 1):
            if (u, t) not in edges and rng.random() < 0.25:
                edges[(u, t)] = float(rng.uniform(0.1, 2.0))
    return build_graph([(u, t, w) for (u, t), w in edges.items()])


@pytest.fixture(scope="session")
def corpus():
    rng = np.random.default_rng(CORPUS_SEED)
    return [random_connected_graph(rng) for _ in range(CORPUS_SIZE)]


@pytest.fixture(scope="session")
def golden_mean():
    return build_graph([(1, 1, 1.0), (1, 2, 1.0), (2, 1, 1.0)])
