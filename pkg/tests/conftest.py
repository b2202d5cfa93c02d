"""Test configuration for pytest."""

import sys
from pathlib import Path

# Add src to path
root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir))

import numpy as np
import pytest

from src.core.generators import WeightLaw, generate_chain
from src.core.graph_core import DataGraph, Partition


@pytest.fixture
def two_triangles():
    """
    Two triangles joined by one light edge.

    Nodes 0, 1, 2 form cluster 0 and 3, 4, 5 cluster 1; the heavy edges 1-2 and
    3-4 connect the boundary endpoints 2 and 3 to the sampled nodes 1 and 4.
    """
    g = DataGraph.from_edges(
        6,
        [
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 4.0),
            (2, 3, 1.0),
            (3, 4, 4.0),
            (3, 5, 1.0),
            (4, 5, 1.0),
        ],
    )
    p = Partition(np.array([0, 0, 0, 1, 1, 1]))
    return g, p, np.array([1, 4])


@pytest.fixture
def small_chain():
    """Ten-node chain with two clusters of five; intra weight 1, boundary weight 0.5."""
    return generate_chain(10, 5, WeightLaw.constant(1.0), WeightLaw.constant(0.5))


def build_random_instance(rng, max_nodes=12, max_boundary=3, max_edges=60):
    """
    Random graph, partition and sampling set.

    Every cluster is a weighted path plus random chords; at most ``max_boundary``
    edges join different clusters. Weights are uniform in [0.2, 2].
    """
    n = int(rng.integers(4, max_nodes + 1))
    clusters = int(rng.integers(2, min(4, n // 2) + 1))
    labels = np.concatenate([np.arange(clusters), rng.integers(0, clusters, n - clusters)])
    rng.shuffle(labels)

    pairs = []
    for c in range(clusters):
        nodes = np.flatnonzero(labels == c)
        pairs += [(int(a), int(b)) for a, b in zip(nodes[:-1], nodes[1:])]
    taken = set(pairs)
    chords = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if labels[i] == labels[j] and (i, j) not in taken
    ]
    cross = [(i, j) for i in range(n) for j in range(i + 1, n) if labels[i] != labels[j]]
    boundary_count = int(rng.integers(1, min(max_boundary, len(cross)) + 1))
    pairs += [cross[k] for k in rng.choice(len(cross), boundary_count, replace=False)]
    room = max(0, min(len(chords), max_edges - len(pairs)))
    if room:
        extra = int(rng.integers(0, room + 1))
        pairs += [chords[k] for k in rng.choice(len(chords), extra, replace=False)]

    g = DataGraph.from_edges(n, [(i, j, float(rng.uniform(0.2, 2.0))) for i, j in pairs])
    m = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
    return g, Partition(labels.astype(np.int64)), m


@pytest.fixture
def random_instance():
    """Builder for random (graph, partition, sampling set) triples."""
    return build_random_instance
