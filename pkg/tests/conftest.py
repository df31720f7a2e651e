import numpy as np
import pytest

from localcluster import build_graph


def clique_edges(nodes, weight=1.0):
    return [(u, v, weight) for i, u in enumerate(nodes) for v in nodes[i + 1:]]


def disjoint_cliques(sizes):
    """Graph of disjoint cliques plus the block label of every node."""
    edges, labels, start = [], [], 0
    for lab, size in enumerate(sizes):
        nodes = list(range(start, start + size))
        edges += clique_edges(nodes)
        labels += [lab] * size
        start += size
    return build_graph(edges, n=start), np.asarray(labels, dtype=np.int64)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
