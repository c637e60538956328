import numpy as np
import pytest

from hypergrowth import ModelParams, grow


@pytest.fixture(scope="session")
def params_small():
    return ModelParams(m=1.5, L=2.5, gamma=2.1, T=0.4, zeta=1.0, t=300)


@pytest.fixture(scope="session")
def net_small(params_small):
    return grow(params_small, "epso", seed=42)


@pytest.fixture(scope="session")
def snap_small(net_small):
    return net_small.to_snapshot()


def random_snapshot(n, p_edge, seed):
    """Erdos-Renyi style test graph as an AdjacencySnapshot."""
    from hypergrowth import AdjacencySnapshot

    rng = np.random.default_rng(seed)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p_edge
    ]
    return AdjacencySnapshot.from_edges(edges, node_ids=tuple(range(n)))
