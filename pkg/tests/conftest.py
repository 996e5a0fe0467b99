"""Shared fixtures and brute-force oracles."""

import itertools

import numpy as np
import pytest

from probgraph import CsrGraph


def random_graph(n: int, p: float, seed: int) -> CsrGraph:
    """Erdos-Renyi G(n, p), deterministic per seed."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    return CsrGraph.from_edges(np.stack([iu[mask], iv[mask]], axis=1), n=n)


def adjacency_sets(graph: CsrGraph):
    return [set(graph.neighbors(v).tolist()) for v in range(graph.n)]


def brute_force_triangles(graph: CsrGraph) -> int:
    adj = adjacency_sets(graph)
    count = 0
    for a, b, c in itertools.combinations(range(graph.n), 3):
        if b in adj[a] and c in adj[a] and c in adj[b]:
            count += 1
    return count


def brute_force_4cliques(graph: CsrGraph) -> int:
    adj = adjacency_sets(graph)
    count = 0
    for quad in itertools.combinations(range(graph.n), 4):
        if all(y in adj[x] for x, y in itertools.combinations(quad, 2)):
            count += 1
    return count


def complete_graph(n: int) -> CsrGraph:
    return CsrGraph.from_edges(list(itertools.combinations(range(n), 2)),
                               n=n)


def cycle_graph(n: int) -> CsrGraph:
    return CsrGraph.from_edges([(i, (i + 1) % n) for i in range(n)], n=n)


def path_graph(n: int) -> CsrGraph:
    return CsrGraph.from_edges([(i, i + 1) for i in range(n - 1)], n=n)


def overlap_sets(size_x: int, size_y: int, common: int):
    """Two integer sets with the given sizes and intersection size."""
    shared = np.arange(common, dtype=np.int64)
    x = np.concatenate([shared, 1000 + np.arange(size_x - common)])
    y = np.concatenate([shared, 2000 + np.arange(size_y - common)])
    return np.sort(x), np.sort(y)


@pytest.fixture
def triangle():
    return cycle_graph(3)


@pytest.fixture
def k4():
    return complete_graph(4)
