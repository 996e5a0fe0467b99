"""Graph-mining algorithms, generic over an intersection provider.

Triangle and 4-clique counting run over the degree-ordered directed view
so each clique is counted once; clustering, vertex similarity, and link
prediction run over undirected neighborhoods. Every algorithm accepts any
:class:`~probgraph.providers.IntersectionProvider`, so swapping the exact
baseline for a sketch estimator is a one-argument change.

Outer loops are chunked over a fixed grid and the chunks fan out to a
thread pool; partial sums are combined in chunk order, so results do not
depend on the thread count (exact counts are bit-identical, floating
point sums are reduction-order stable).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import EstimatorKind
from .graphs import CsrGraph, DirectedView, degree_order
from .providers import (ExactProvider, IntersectionProvider,
                        make_provider)
from .setops import intersect_members
from .sketches import SketchedGraph

__all__ = [
    "SimilarityMeasure",
    "ClusterResult",
    "LinkPredSplit",
    "triangle_count",
    "tc_estimate",
    "four_clique_count",
    "vertex_similarity",
    "jarvis_patrick_cluster",
    "make_link_prediction_split",
    "link_prediction_eval",
    "doulion_tc",
    "reduced_execution_tc",
]

_CHUNK = 16384


class SimilarityMeasure(str, enum.Enum):
    JACCARD = "jaccard"
    OVERLAP = "overlap"
    COMMON_NEIGHBORS = "common_neighbors"
    TOTAL_NEIGHBORS = "total_neighbors"
    ADAMIC_ADAR = "adamic_adar"
    RESOURCE_ALLOCATION = "resource_allocation"


_COUNTING_MEASURES = (SimilarityMeasure.JACCARD, SimilarityMeasure.OVERLAP,
                      SimilarityMeasure.COMMON_NEIGHBORS,
                      SimilarityMeasure.TOTAL_NEIGHBORS)


def _chunked_sum(worker, total: int, threads: int):
    """Sum worker(lo, hi) over a fixed chunk grid, in chunk order.

    The grid does not depend on ``threads``, so results are identical for
    any pool size.
    """
    ranges = [(lo, min(lo + _CHUNK, total)) for lo in range(0, total, _CHUNK)]
    if not ranges:
        return 0
    if threads <= 1 or len(ranges) == 1:
        parts = [worker(lo, hi) for lo, hi in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: worker(*r), ranges))
    result = parts[0]
    for p in parts[1:]:
        result = result + p
    return result


def _directed_edge_arrays(view: DirectedView):
    src = np.repeat(np.arange(view.n, dtype=np.int64), view.out_degrees())
    return src, view.adjacency


def triangle_count(view: DirectedView, provider: IntersectionProvider,
                   threads: int = 1):
    """Sum of |N+_v ∩ N+_u| over all directed edges (v, u).

    With an exact provider this is the exact integer triangle count (each
    triangle is counted at its lowest-ranked vertex).
    """
    src, dst = _directed_edge_arrays(view)

    def worker(lo, hi):
        part = provider.pair_many(src[lo:hi], dst[lo:hi])
        return int(part.sum()) if provider.is_exact else float(part.sum())

    total = _chunked_sum(worker, len(src), threads)
    return int(total) if provider.is_exact else float(total)


def tc_estimate(graph: CsrGraph, sketched: SketchedGraph | None = None,
                kind: EstimatorKind = EstimatorKind.BF_AND,
                threads: int = 1) -> float:
    """One third of the summed intersection estimates over all edges.

    Expects sketches over the full undirected neighborhoods (not N+).
    With an exact kind this reproduces the exact triangle count through
    the identity TC = (1/3) * sum over edges of |N_u ∩ N_v|.
    """
    kind = EstimatorKind(kind)
    if kind in (EstimatorKind.EXACT_MERGE, EstimatorKind.EXACT_GALLOP):
        provider = make_provider(kind, graph=graph)
    else:
        if sketched is None:
            raise ValueError("sketch-based estimate needs a SketchedGraph")
        if sketched.source != "undirected":
            raise ValueError("triangle-count estimation needs sketches of "
                             "the undirected neighborhoods")
        provider = make_provider(kind, sketched=sketched)
    edges = graph.edges()
    us, vs = edges[:, 0], edges[:, 1]

    def worker(lo, hi):
        return float(provider.pair_many(us[lo:hi], vs[lo:hi]).sum())

    return float(_chunked_sum(worker, len(us), threads)) / 3.0


def four_clique_count(view: DirectedView, provider: IntersectionProvider,
                      threads: int = 1):
    """For each directed edge (u, v): materialize C3 = N+_u ∩ N+_v exactly,
    then add |N+_w ∩ C3| per w in C3 (estimated via ``provider.with_set``
    when the provider is sketch-based).
    """
    src, dst = _directed_edge_arrays(view)
    off, adj = view.offsets, view.adjacency

    def worker(lo, hi):
        total = 0 if provider.is_exact else 0.0
        for u, v in zip(src[lo:hi].tolist(), dst[lo:hi].tolist()):
            c3 = intersect_members(adj[off[u]:off[u + 1]],
                                   adj[off[v]:off[v + 1]])
            if len(c3) == 0:
                continue
            for w in c3.tolist():
                total += provider.with_set(w, c3)
        return total

    total = _chunked_sum(worker, len(src), threads)
    return int(total) if provider.is_exact else float(total)


def _feasible_count(c: float, du: int, dv: int) -> float:
    """Clamp an intersection estimate into [0, min(du, dv)]."""
    return min(max(c, 0.0), float(min(du, dv)))


def vertex_similarity(u: int, v: int, measure: SimilarityMeasure,
                      provider: IntersectionProvider,
                      graph: CsrGraph) -> float:
    """Similarity of N_u and N_v under the chosen measure.

    Counting measures are computed from the provider's intersection
    estimate and exact degrees; for the ratio/union forms the estimate is
    first clamped into the feasible range [0, min(d_u, d_v)]. Membership
    measures (Adamic-Adar, resource allocation) iterate the common
    members, which only exact and MinHash providers can enumerate --
    Bloom or KMV raise :class:`UnsupportedCombinationError`. A common
    neighbor of degree 1 would divide by log(1) = 0 and contributes 0.
    """
    if u == v:
        raise ValueError("vertex similarity needs two distinct vertices")
    measure = SimilarityMeasure(measure)
    du, dv = graph.degree(u), graph.degree(v)
    if measure in _COUNTING_MEASURES:
        c = float(provider.pair(u, v))
        if measure is SimilarityMeasure.COMMON_NEIGHBORS:
            return c
        c = _feasible_count(c, du, dv)
        if measure is SimilarityMeasure.JACCARD:
            denom = du + dv - c
            return c / denom if denom > 0 else 0.0
        if measure is SimilarityMeasure.OVERLAP:
            lo = min(du, dv)
            return c / lo if lo > 0 else 0.0
        return du + dv - c  # TOTAL_NEIGHBORS
    members = provider.common_members(u, v)
    degs = graph.degrees()[members] if len(members) else np.empty(0)
    if measure is SimilarityMeasure.ADAMIC_ADAR:
        total = 0.0
        for d in degs.tolist():
            if d > 1:
                total += 1.0 / math.log(d)
        return total
    total = 0.0
    for d in degs.tolist():
        if d > 0:
            total += 1.0 / d
    return total


@dataclass
class ClusterResult:
    kept_edges: np.ndarray     # (c, 2) edges whose score cleared tau
    cluster_count: int         # connected components with >= 2 vertices
    singleton_count: int       # vertices touching no kept edge


def jarvis_patrick_cluster(graph: CsrGraph,
                           provider: IntersectionProvider,
                           tau: float, threads: int = 1) -> ClusterResult:
    """Keep each edge whose common-neighbor score strictly exceeds tau,
    then count connected components of the kept-edge graph."""
    edges = graph.edges()
    us, vs = edges[:, 0], edges[:, 1]
    scores = np.empty(len(us), dtype=np.float64)

    def worker(lo, hi):
        scores[lo:hi] = provider.pair_many(us[lo:hi], vs[lo:hi])
        return 0

    _chunked_sum(worker, len(us), threads)
    kept = edges[scores > tau]

    parent = np.arange(graph.n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in kept.tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    touched = np.unique(kept.reshape(-1))
    roots = {find(int(t)) for t in touched}
    return ClusterResult(kept, len(roots), graph.n - len(touched))


@dataclass
class LinkPredSplit:
    """A disjoint split E = E_sparse ∪ E_removed for prediction testing."""

    sparse_graph: CsrGraph
    edges_sparse: np.ndarray
    edges_removed: np.ndarray
    fraction: float
    seed: int


def make_link_prediction_split(graph: CsrGraph, fraction: float,
                               seed: int) -> LinkPredSplit:
    """Remove round(fraction * m) random edges as the prediction targets."""
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must be in [0, 1]")
    edges = graph.edges()
    rng = np.random.default_rng(seed)
    r = int(round(fraction * len(edges)))
    removed_idx = np.sort(rng.choice(len(edges), size=r, replace=False))
    mask = np.zeros(len(edges), dtype=bool)
    mask[removed_idx] = True
    removed = edges[mask]
    sparse = edges[~mask]
    sparse_graph = CsrGraph.from_edges(sparse, n=graph.n)
    return LinkPredSplit(sparse_graph, sparse, removed, fraction, seed)


def _pair_keys(pairs: np.ndarray, n: int) -> np.ndarray:
    return pairs[:, 0].astype(np.int64) * n + pairs[:, 1]


def _two_hop_candidates(graph: CsrGraph) -> np.ndarray:
    """Non-adjacent vertex pairs with at least one common neighbor."""
    chunks = []
    for w in range(graph.n):
        nb = graph.neighbors(w)
        if len(nb) < 2:
            continue
        iu, iv = np.triu_indices(len(nb), k=1)
        chunks.append(np.stack([nb[iu], nb[iv]], axis=1))
    if not chunks:
        return np.empty((0, 2), dtype=np.int64)
    pairs = np.unique(np.concatenate(chunks), axis=0)
    edge_keys = np.sort(_pair_keys(graph.edges(), graph.n))
    keys = _pair_keys(pairs, graph.n)
    pos = np.searchsorted(edge_keys, keys)
    pos = np.minimum(pos, max(len(edge_keys) - 1, 0))
    is_edge = len(edge_keys) > 0
    if is_edge:
        hit = edge_keys[pos] == keys
        pairs = pairs[~hit]
    return pairs


def link_prediction_eval(graph: CsrGraph, split: LinkPredSplit,
                         measure: SimilarityMeasure,
                         provider: IntersectionProvider,
                         top_count: int) -> int:
    """How many of the top-scored candidate pairs are removed edges.

    Candidates are the 2-hop pairs of the sparse graph (every listed
    measure is zero beyond two hops); scores come from
    ``vertex_similarity`` on the sparse graph; ties rank lexicographically
    by (u, v). ``top_count`` is capped at the candidate count. The bound
    ``provider`` must be built over ``split.sparse_graph``.
    """
    if len(split.edges_sparse) + len(split.edges_removed) != graph.m:
        raise ValueError("split does not cover the graph's edge set")
    measure = SimilarityMeasure(measure)
    if top_count <= 0:
        return 0
    sparse = split.sparse_graph
    cands = _two_hop_candidates(sparse)
    if len(cands) == 0:
        return 0
    scores = np.empty(len(cands), dtype=np.float64)
    for i, (u, v) in enumerate(cands.tolist()):
        scores[i] = vertex_similarity(u, v, measure, provider, sparse)
    order = np.lexsort((cands[:, 1], cands[:, 0], -scores))
    top = cands[order[:min(top_count, len(cands))]]
    removed_keys = np.sort(_pair_keys(split.edges_removed, graph.n))
    top_keys = _pair_keys(top, graph.n)
    return int(np.count_nonzero(np.isin(top_keys, removed_keys)))


def doulion_tc(graph: CsrGraph, keep_prob: float, seed: int,
               threads: int = 1) -> float:
    """Keep each edge with probability p, count exactly, rescale by p^-3."""
    if not 0 < keep_prob <= 1:
        raise ValueError("keep probability must be in (0, 1]")
    edges = graph.edges()
    rng = np.random.default_rng(seed)
    kept = edges[rng.random(len(edges)) < keep_prob] \
        if keep_prob < 1 else edges
    sub = CsrGraph.from_edges(kept, n=graph.n)
    view = degree_order(sub)
    exact = ExactProvider.for_view(view)
    return triangle_count(view, exact, threads) / keep_prob**3


def reduced_execution_tc(view: DirectedView, fraction: float, seed: int,
                         threads: int = 1) -> float:
    """Run the node-iterator outer loop on a random vertex subset of the
    given fraction and rescale the partial sum by 1/fraction."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    rng = np.random.default_rng(seed)
    count = max(1, int(round(fraction * view.n)))
    sample = np.sort(rng.choice(view.n, size=count, replace=False))
    sizes = view.out_degrees()[sample]
    src = np.repeat(sample, sizes)
    dst = np.concatenate([view.out_neighbors(v) for v in sample.tolist()]) \
        if len(sample) else np.empty(0, dtype=np.int64)
    exact = ExactProvider.for_view(view)

    def worker(lo, hi):
        return int(exact.pair_many(src[lo:hi], dst[lo:hi]).sum())

    return float(_chunked_sum(worker, len(src), threads)) / fraction
