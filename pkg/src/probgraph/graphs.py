"""CSR graph representation, loaders, degree ordering, and generators.

Graphs are simple and undirected: adjacency lists are sorted, duplicate
free, contain no self loops, and are symmetric (u in N_v iff v in N_u).
Vertex IDs are dense in [0, n); loaders remap sparse IDs and keep the
mapping on the returned graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CsrGraph",
    "DirectedView",
    "DegreeStats",
    "ParseError",
    "load_edge_list",
    "write_edge_list",
    "degree_order",
    "generate_kronecker",
    "degree_stats",
]


class ParseError(ValueError):
    """Malformed graph input file."""


class CsrGraph:
    """Undirected graph in compressed sparse row form.

    Attributes:
        n: vertex count.
        m: undirected edge count (each edge stored twice in adjacency).
        offsets: int64 array of n+1 cumulative indices.
        adjacency: int64 array of 2m neighbor IDs, sorted per vertex.
        original_ids: optional int64 array mapping dense ID -> input ID
            (present when a loader had to remap sparse IDs).
    """

    __slots__ = ("n", "m", "offsets", "adjacency", "original_ids",
                 "self_loops_dropped", "duplicates_dropped")

    def __init__(self, offsets: np.ndarray, adjacency: np.ndarray,
                 original_ids: np.ndarray | None = None):
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.adjacency = np.asarray(adjacency, dtype=np.int64)
        self.n = len(self.offsets) - 1
        self.m = len(self.adjacency) // 2
        self.original_ids = original_ids
        self.self_loops_dropped = 0
        self.duplicates_dropped = 0

    @classmethod
    def from_edges(cls, edges, n: int | None = None) -> "CsrGraph":
        """Build a graph from an iterable/array of (u, v) pairs.

        Symmetrizes, deduplicates, and drops self loops. ``n`` defaults to
        max ID + 1.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        loops = 0
        dups = 0
        if len(edges):
            u = np.minimum(edges[:, 0], edges[:, 1])
            v = np.maximum(edges[:, 0], edges[:, 1])
            keep = u != v
            loops = int(len(edges) - keep.sum())
            uv = np.unique(np.stack([u[keep], v[keep]], axis=1), axis=0)
            dups = int(keep.sum()) - len(uv)
        else:
            uv = np.empty((0, 2), dtype=np.int64)
        if n is None:
            n = int(uv.max()) + 1 if len(uv) else 0
        if len(uv) and uv.max() >= n:
            raise ValueError("edge endpoint exceeds vertex count")
        src = np.concatenate([uv[:, 0], uv[:, 1]])
        dst = np.concatenate([uv[:, 1], uv[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.add.at(offsets, src + 1, 1)
        g = cls(np.cumsum(offsets), dst)
        g.self_loops_dropped = loops
        g.duplicates_dropped = dups
        return g

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor IDs of v (a view, do not mutate)."""
        return self.adjacency[self.offsets[v]:self.offsets[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def edges(self) -> np.ndarray:
        """(m, 2) array with each undirected edge once, u < v, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = src < self.adjacency
        return np.stack([src[mask], self.adjacency[mask]], axis=1)

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        if len(self.offsets) != self.n + 1 or self.offsets[0] != 0:
            raise ValueError("bad offsets")
        if np.any(np.diff(self.offsets) < 0):
            raise ValueError("offsets not non-decreasing")
        if self.offsets[-1] != 2 * self.m or len(self.adjacency) != 2 * self.m:
            raise ValueError("offsets[n] != 2m")
        for v in range(self.n):
            nb = self.neighbors(v)
            if len(nb) == 0:
                continue
            if np.any(np.diff(nb) <= 0):
                raise ValueError(f"neighborhood of {v} not sorted/unique")
            if np.any(nb == v):
                raise ValueError(f"self loop at {v}")
        # symmetry: sorted (u,v) multiset equals sorted (v,u) multiset
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        fwd = np.lexsort((self.adjacency, src))
        rev = np.lexsort((src, self.adjacency))
        if not (np.array_equal(src[fwd], self.adjacency[rev])
                and np.array_equal(self.adjacency[fwd], src[rev])):
            raise ValueError("adjacency not symmetric")


@dataclass(frozen=True)
class DirectedView:
    """Degree-ordered directed view of a graph.

    ``rank`` is a permutation with rank[v] < rank[u] implying
    d_v <= d_u (ties broken by vertex ID). N+_v keeps the neighbors ranked
    above v, so each undirected edge lands in exactly one N+.
    """

    n: int
    m: int
    rank: np.ndarray
    offsets: np.ndarray
    adjacency: np.ndarray

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[self.offsets[v]:self.offsets[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.offsets)


def degree_order(graph: CsrGraph) -> DirectedView:
    """Orient each edge from lower to higher (degree, ID) rank."""
    deg = graph.degrees()
    order = np.lexsort((np.arange(graph.n), deg))
    rank = np.empty(graph.n, dtype=np.int64)
    rank[order] = np.arange(graph.n)
    src = np.repeat(np.arange(graph.n, dtype=np.int64), deg)
    keep = rank[src] < rank[graph.adjacency]
    out_src = src[keep]
    out_dst = graph.adjacency[keep]
    offsets = np.zeros(graph.n + 1, dtype=np.int64)
    np.add.at(offsets, out_src + 1, 1)
    return DirectedView(graph.n, graph.m, rank, np.cumsum(offsets), out_dst)


def _parse_pairs_text(lines, comment_prefix: str, one_indexed: bool):
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(comment_prefix):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {stripped!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-integer vertex id") from exc
        if one_indexed:
            u, v = u - 1, v - 1
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative vertex id")
        pairs.append((u, v))
    return pairs


def load_edge_list(path, *, indexing: str = "zero",
                   comment_prefix: str = "#") -> CsrGraph:
    """Load a whitespace-separated "u v" edge list (or MatrixMarket).

    Duplicate edges are collapsed, self loops dropped (counted on the
    returned graph). A leading ``%%MatrixMarket matrix coordinate pattern``
    header switches to MatrixMarket parsing (1-indexed, n taken from the
    size line). Sparse vertex IDs are remapped to [0, n); the mapping is
    kept in ``graph.original_ids``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("%%MatrixMarket"):
            header = first.lower().split()
            if "coordinate" not in header or "pattern" not in header:
                raise ParseError("unsupported MatrixMarket format "
                                 "(need 'coordinate pattern')")
            line = fh.readline()
            while line.startswith("%"):
                line = fh.readline()
            dims = line.split()
            if len(dims) != 3:
                raise ParseError("bad MatrixMarket size line")
            rows, cols, _ = (int(x) for x in dims)
            pairs = _parse_pairs_text(fh, "%", one_indexed=True)
            return _build_loaded(pairs, n=max(rows, cols))
        lines = [first] if first else []
        lines.extend(fh)
    one_indexed = indexing == "one"
    if indexing not in ("zero", "one"):
        raise ValueError("indexing must be 'zero' or 'one'")
    pairs = _parse_pairs_text(lines, comment_prefix, one_indexed)
    return _build_loaded(pairs, n=None)


def _build_loaded(pairs, n: int | None) -> CsrGraph:
    if not pairs:
        return CsrGraph.from_edges(np.empty((0, 2), dtype=np.int64), n=n or 0)
    edges = np.asarray(pairs, dtype=np.int64)
    original_ids = None
    if n is None:
        seen = np.unique(edges)
        dense = len(seen) == seen[-1] + 1 and seen[0] == 0
        if not dense:
            original_ids = seen
            edges = np.searchsorted(seen, edges)
            n = len(seen)
        else:
            n = int(seen[-1]) + 1
    g = CsrGraph.from_edges(edges, n=n)
    g.original_ids = original_ids
    return g


def write_edge_list(graph: CsrGraph, path) -> None:
    """Write each undirected edge once as "u v" (dense IDs)."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")


def generate_kronecker(scale: int, edge_factor: int, seed: int) -> CsrGraph:
    """Power-law synthetic graph with n = 2**scale vertices.

    Draws edge_factor * n edge samples by recursive quadrant descent with
    initiator probabilities (0.57, 0.19, 0.19, 0.05) (the Graph500
    defaults), then symmetrizes, deduplicates, and drops self loops, so
    the resulting simple graph has somewhat fewer than edge_factor * n
    edges. Deterministic for a fixed seed.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    n = 1 << scale
    count = edge_factor * n
    rng = np.random.default_rng(seed)
    a, b, c = 0.57, 0.19, 0.19
    ab = a + b
    c_norm = c / (1.0 - ab)
    a_norm = a / ab
    src = np.zeros(count, dtype=np.int64)
    dst = np.zeros(count, dtype=np.int64)
    for level in range(scale):
        src_bit = rng.random(count) > ab
        dst_bit = rng.random(count) > np.where(src_bit, c_norm, a_norm)
        src |= src_bit.astype(np.int64) << level
        dst |= dst_bit.astype(np.int64) << level
    return CsrGraph.from_edges(np.stack([src, dst], axis=1), n=n)


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    mean_degree: float
    sum_d2: int
    sum_d3: int


def degree_stats(graph: CsrGraph) -> DegreeStats:
    """Exact degree aggregates used by the triangle-count bounds."""
    deg = graph.degrees()
    if graph.n == 0:
        return DegreeStats(0, 0.0, 0, 0)
    d = deg.astype(np.int64)
    return DegreeStats(
        max_degree=int(d.max(initial=0)),
        mean_degree=float(d.mean()) if graph.n else 0.0,
        sum_d2=int(np.sum(d * d)),
        sum_d3=int(np.sum(d * d * d)),
    )
