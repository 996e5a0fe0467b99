"""Intersection providers: one call surface over exact neighborhoods and
every sketch estimator.

A provider answers |S_u ∩ S_v| questions for the vertex sets it was bound
to (undirected N_v or directed N+_v), either exactly from CSR slices or
approximately from a :class:`~probgraph.sketches.SketchedGraph`. The
mining algorithms are generic over this surface.

Batch calls (``pair_many``) are the fast path: Bloom pairs reduce to a
word-wise AND plus population count over gathered matrix rows, MinHash
pairs to vectorized entry comparisons. Providers are read-only after
construction and safe to share across threads.
"""

from __future__ import annotations

import numpy as np

from .estimators import (EstimatorKind, est_intersection_kmv,
                         est_intersection_minhash, swamidass_value)
from .graphs import CsrGraph, DirectedView
from .setops import intersect_count, intersect_gallop, intersect_members, \
    intersect_merge
from .sketches import (SketchKind, SketchedGraph, build_bloom, build_khash,
                       build_kmv, build_onehash)

__all__ = [
    "UnsupportedCombinationError",
    "IntersectionProvider",
    "ExactProvider",
    "BloomProvider",
    "MinHashProvider",
    "KmvProvider",
    "make_provider",
]

_BATCH = 16384


class UnsupportedCombinationError(ValueError):
    """Asked a provider for something its sketch kind cannot deliver."""


class IntersectionProvider:
    kind: EstimatorKind
    is_exact = False

    def pair(self, u: int, v: int) -> float:
        raise NotImplementedError

    def pair_many(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        out = np.empty(len(us), dtype=np.float64)
        for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
            out[i] = self.pair(u, v)
        return out

    def with_set(self, w: int, members: np.ndarray) -> float:
        """|S_w ∩ members| for an explicitly materialized vertex set."""
        raise NotImplementedError

    def common_members(self, u: int, v: int) -> np.ndarray:
        """The intersection members themselves, where enumerable."""
        raise UnsupportedCombinationError(
            f"{self.kind.value} cannot enumerate intersection members")


class ExactProvider(IntersectionProvider):
    """Exact counts from sorted CSR adjacency slices."""

    is_exact = True

    def __init__(self, offsets: np.ndarray, adjacency: np.ndarray,
                 strategy: str = "merge"):
        if strategy not in ("merge", "gallop", "auto"):
            raise ValueError("strategy must be merge, gallop, or auto")
        self.offsets = offsets
        self.adjacency = adjacency
        self.strategy = strategy
        self.sizes = np.diff(offsets)
        self.kind = (EstimatorKind.EXACT_GALLOP if strategy == "gallop"
                     else EstimatorKind.EXACT_MERGE)

    @classmethod
    def for_graph(cls, graph: CsrGraph, strategy: str = "merge"):
        return cls(graph.offsets, graph.adjacency, strategy)

    @classmethod
    def for_view(cls, view: DirectedView, strategy: str = "merge"):
        return cls(view.offsets, view.adjacency, strategy)

    def _slice(self, v: int) -> np.ndarray:
        return self.adjacency[self.offsets[v]:self.offsets[v + 1]]

    def pair(self, u: int, v: int) -> int:
        a, b = self._slice(u), self._slice(v)
        if self.strategy == "merge":
            return intersect_merge(a, b)
        if self.strategy == "gallop":
            return intersect_gallop(a, b)
        return intersect_count(a, b)

    def pair_many(self, us, vs) -> np.ndarray:
        out = np.empty(len(us), dtype=np.int64)
        off, adj = self.offsets, self.adjacency
        if self.strategy == "merge":
            for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
                a = adj[off[u]:off[u + 1]]
                b = adj[off[v]:off[v + 1]]
                merged = np.concatenate((a, b))
                merged.sort(kind="stable")
                out[i] = np.count_nonzero(merged[1:] == merged[:-1])
            return out
        for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
            out[i] = self.pair(u, v)
        return out

    def with_set(self, w: int, members: np.ndarray) -> int:
        return intersect_count(self._slice(w), members)

    def common_members(self, u: int, v: int) -> np.ndarray:
        return intersect_members(self._slice(u), self._slice(v))


class BloomProvider(IntersectionProvider):
    """Bloom-backed estimates; ``kind`` picks AND, limiting, or OR form."""

    def __init__(self, sketched: SketchedGraph, kind: EstimatorKind):
        if sketched.kind is not SketchKind.BLOOM:
            raise ValueError("BloomProvider needs Bloom sketches")
        if kind not in (EstimatorKind.BF_AND, EstimatorKind.BF_L,
                        EstimatorKind.BF_OR):
            raise ValueError(f"{kind} is not a Bloom estimator")
        self.sketched = sketched
        self.kind = kind
        self.sizes = sketched.sizes

    def _estimate_ones(self, ones, us=None, vs=None):
        sg = self.sketched
        if self.kind is EstimatorKind.BF_AND:
            return swamidass_value(sg.bit_length, sg.hash_count, ones)
        if self.kind is EstimatorKind.BF_L:
            return np.asarray(ones, dtype=np.float64) / sg.hash_count
        union_est = swamidass_value(sg.bit_length, sg.hash_count, ones)
        raw = self.sizes[us] + self.sizes[vs] - union_est
        return np.maximum(raw, 0.0)

    def pair(self, u: int, v: int) -> float:
        return float(self.pair_many(np.asarray([u]), np.asarray([v]))[0])

    def pair_many(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        matrix = self.sketched.bit_matrix
        out = np.empty(len(us), dtype=np.float64)
        op = np.bitwise_or if self.kind is EstimatorKind.BF_OR \
            else np.bitwise_and
        for lo in range(0, len(us), _BATCH):
            hi = min(lo + _BATCH, len(us))
            combined = op(matrix[us[lo:hi]], matrix[vs[lo:hi]])
            ones = np.bitwise_count(combined).sum(axis=1).astype(np.float64)
            out[lo:hi] = self._estimate_ones(ones, us[lo:hi], vs[lo:hi])
        return out

    def with_set(self, w: int, members: np.ndarray) -> float:
        sg = self.sketched
        mem_sketch = build_bloom(members, sg.plan, sg.family)
        op = np.bitwise_or if self.kind is EstimatorKind.BF_OR \
            else np.bitwise_and
        ones = int(np.bitwise_count(op(sg.bit_matrix[w],
                                       mem_sketch.words)).sum())
        if self.kind is EstimatorKind.BF_OR:
            raw = (self.sizes[w] + len(members)
                   - swamidass_value(sg.bit_length, sg.hash_count, ones))
            return max(0.0, float(raw))
        return float(self._estimate_ones(ones))


class MinHashProvider(IntersectionProvider):
    """k-Hash or 1-Hash estimates from stored entry matrices."""

    def __init__(self, sketched: SketchedGraph):
        if sketched.kind is SketchKind.KHASH:
            self.kind = EstimatorKind.KHASH
        elif sketched.kind is SketchKind.ONEHASH:
            self.kind = EstimatorKind.ONEHASH
        else:
            raise ValueError("MinHashProvider needs MinHash sketches")
        self.sketched = sketched
        self.sizes = sketched.sizes

    def pair(self, u: int, v: int) -> float:
        sg = self.sketched
        return est_intersection_minhash(sg.sketch(u), sg.sketch(v),
                                        int(self.sizes[u]),
                                        int(self.sizes[v]))

    def _matches_khash(self, eu, ev):
        return np.count_nonzero((eu == ev) & (eu >= 0), axis=1)

    def _matches_onehash(self, eu, ev):
        ev = ev.copy()
        ev[ev < 0] = -2  # pads must never match the -1 pads of eu
        return (eu[:, :, None] == ev[:, None, :]).any(axis=2).sum(axis=1)

    def pair_many(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        sg = self.sketched
        cap = sg.capacity
        out = np.empty(len(us), dtype=np.float64)
        # keep the k x k comparison blocks of the 1-Hash kernel bounded
        batch = _BATCH if sg.kind is SketchKind.KHASH \
            else max(64, min(_BATCH, 2**24 // max(1, cap * cap)))
        for lo in range(0, len(us), batch):
            hi = min(lo + batch, len(us))
            ub, vb = us[lo:hi], vs[lo:hi]
            eu = sg.entries[ub]
            ev = sg.entries[vb]
            if sg.kind is SketchKind.KHASH:
                matches = self._matches_khash(eu, ev)
            else:
                matches = self._matches_onehash(eu, ev)
            matches = matches.astype(np.float64)
            su = self.sizes[ub].astype(np.float64)
            sv = self.sizes[vb].astype(np.float64)
            j = matches / cap
            est = (j / (1.0 + j)) * (su + sv)
            if sg.kind is SketchKind.ONEHASH:
                verbatim = (su <= cap) & (sv <= cap)
                est = np.where(verbatim, matches, est)
            out[lo:hi] = est
        return out

    def with_set(self, w: int, members: np.ndarray) -> float:
        sg = self.sketched
        if sg.kind is SketchKind.KHASH:
            mem = build_khash(members, sg.capacity, sg.family)
        else:
            mem = build_onehash(members, sg.capacity, sg.family)
        return est_intersection_minhash(sg.sketch(w), mem,
                                        int(self.sizes[w]), len(members))

    def common_members(self, u: int, v: int) -> np.ndarray:
        sg = self.sketched
        if sg.kind is SketchKind.ONEHASH:
            return intersect_members(sg.sketch(u).entries,
                                     sg.sketch(v).entries)
        # distinct IDs shared by the two entry multisets
        return np.intersect1d(np.unique(sg.sketch(u).entries),
                              np.unique(sg.sketch(v).entries))


class KmvProvider(IntersectionProvider):
    def __init__(self, sketched: SketchedGraph):
        if sketched.kind is not SketchKind.KMV:
            raise ValueError("KmvProvider needs KMV sketches")
        self.kind = EstimatorKind.KMV
        self.sketched = sketched
        self.sizes = sketched.sizes

    def pair(self, u: int, v: int) -> float:
        sg = self.sketched
        return est_intersection_kmv(sg.sketch(u), sg.sketch(v),
                                    int(self.sizes[u]), int(self.sizes[v]))

    def pair_many(self, us, vs) -> np.ndarray:
        # Row-wise form of est_intersection_kmv: sort the concatenated
        # value rows (inf pads sink to the end), count distinct values by
        # prefix sums, and read the k_eff-th distinct value as the union
        # threshold. A value stored in both rows shows up as one adjacent
        # equal pair, which yields the common count for the degenerate
        # fallback.
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        sg = self.sketched
        cap = sg.capacity
        out = np.empty(len(us), dtype=np.float64)
        for lo in range(0, len(us), _BATCH):
            hi = min(lo + _BATCH, len(us))
            ub, vb = us[lo:hi], vs[lo:hi]
            merged = np.sort(np.concatenate([sg.values[ub], sg.values[vb]],
                                            axis=1), axis=1)
            finite = np.isfinite(merged)
            adj_eq = (merged[:, 1:] == merged[:, :-1]) & finite[:, 1:]
            common = adj_eq.sum(axis=1).astype(np.float64)
            distinct = finite.copy()
            distinct[:, 1:] &= ~adj_eq
            union_count = distinct.sum(axis=1).astype(np.float64)
            su = self.sizes[ub].astype(np.float64)
            sv = self.sizes[vb].astype(np.float64)
            k_eff = np.minimum(sg.lengths[ub], sg.lengths[vb])
            cum = np.cumsum(distinct, axis=1)
            pos = np.argmax(cum >= np.maximum(k_eff, 1)[:, None], axis=1)
            kth = np.take_along_axis(merged, pos[:, None], axis=1)[:, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                est_union = (k_eff - 1) / kth
            raw = np.where(
                (su <= cap) & (sv <= cap), su + sv - union_count,
                np.where(k_eff < 2, common, su + sv - est_union))
            out[lo:hi] = np.clip(raw, 0.0, np.minimum(su, sv))
        return out

    def with_set(self, w: int, members: np.ndarray) -> float:
        sg = self.sketched
        mem = build_kmv(members, sg.capacity, sg.family)
        return est_intersection_kmv(sg.sketch(w), mem,
                                    int(self.sizes[w]), len(members))


def make_provider(kind: EstimatorKind, *, graph: CsrGraph | None = None,
                  view: DirectedView | None = None,
                  sketched: SketchedGraph | None = None
                  ) -> IntersectionProvider:
    """Build the provider for an estimator kind.

    Exact kinds bind to ``view`` when given, else to ``graph``; sketch
    kinds require ``sketched`` of the matching sketch kind.
    """
    kind = EstimatorKind(kind)
    if kind in (EstimatorKind.EXACT_MERGE, EstimatorKind.EXACT_GALLOP):
        strategy = "gallop" if kind is EstimatorKind.EXACT_GALLOP else "merge"
        if view is not None:
            return ExactProvider.for_view(view, strategy)
        if graph is not None:
            return ExactProvider.for_graph(graph, strategy)
        raise ValueError("exact provider needs a graph or a directed view")
    if sketched is None:
        raise ValueError(f"{kind.value} provider needs sketches")
    if kind in (EstimatorKind.BF_AND, EstimatorKind.BF_L,
                EstimatorKind.BF_OR):
        return BloomProvider(sketched, kind)
    if kind in (EstimatorKind.KHASH, EstimatorKind.ONEHASH):
        provider = MinHashProvider(sketched)
        if provider.kind is not kind:
            raise ValueError(f"sketches are {sketched.kind.value}, "
                             f"estimator wants {kind.value}")
        return provider
    return KmvProvider(sketched)
