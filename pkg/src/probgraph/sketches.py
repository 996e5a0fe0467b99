"""Neighborhood sketches and the storage-budget planner.

Four sketch kinds represent a vertex neighborhood:

  * Bloom: fixed-width bit vector, b hash functions;
  * k-Hash: per hash function i, the neighbor with the smallest h_i
    (duplicates across positions allowed);
  * 1-Hash: the min(k, d_v) distinct neighbors with the smallest h_1,
    stored as sorted vertex IDs;
  * KMV: the min(k, d_v) smallest distinct unit-interval hash values.

All sketches of one graph share one size and one hash family, so pairwise
operations are word-aligned and load-balanced. Hash ties are broken toward
the smaller vertex ID, which makes construction deterministic even under
64-bit collisions. Empty neighborhoods get materialized empty sketches so
everything stays indexable by vertex ID.

The budget planner maps a storage fraction s of the CSR footprint
((n + 2m) words) to a uniform per-vertex size:

  * Bloom: B_X = the largest multiple of the word width W with
    n * B_X <= s * (n + 2m) * W (at least one word);
  * MinHash/KMV: k = max(1, floor(s * 2m / n)) one-word entries.

The budget never stretches: if even the minimum size does not fit,
planning raises ``BudgetError``. Per-vertex sizes are uniform rather than
degree-proportional; unused capacity of small neighborhoods is not
reallocated.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from .graphs import CsrGraph, DirectedView, degree_order
from .hashing import (DEFAULT_HASH_SEED, HashFamily, bit_positions,
                      hash_words, unit_values)

__all__ = [
    "WORD_BITS",
    "SketchKind",
    "BudgetError",
    "BudgetPlan",
    "plan_budget",
    "BloomSketch",
    "KHashSketch",
    "OneHashSketch",
    "KmvSketch",
    "build_bloom",
    "build_khash",
    "build_onehash",
    "build_kmv",
    "SketchedGraph",
    "build_sketched_graph",
    "dump_sketches",
    "load_sketches",
]

WORD_BITS = 64

_INT_BIG = np.int64(2**62)
_UONE = np.uint64(1)


class SketchKind(str, enum.Enum):
    BLOOM = "bloom"
    KHASH = "khash"
    ONEHASH = "onehash"
    KMV = "kmv"


class BudgetError(ValueError):
    """The storage budget cannot fit the minimum per-vertex sketch."""


@dataclass(frozen=True)
class BudgetPlan:
    """Uniform per-vertex sketch sizing under a storage budget.

    ``bits_per_vertex`` is B_X for Bloom and W*k for the others;
    ``entries_per_vertex`` is k (0 for Bloom); ``hash_count`` is b for
    Bloom, k for k-Hash, 1 for 1-Hash/KMV.
    """

    kind: SketchKind
    s: float
    bits_per_vertex: int
    entries_per_vertex: int
    hash_count: int
    total_bits: int
    budget_bits: int

    @classmethod
    def explicit(cls, kind: SketchKind, n: int, *, bits: int = 0,
                 k: int = 0, b: int = 1) -> "BudgetPlan":
        """A plan with directly chosen sizes, bypassing the budget rule."""
        kind = SketchKind(kind)
        if kind is SketchKind.BLOOM:
            if bits < WORD_BITS or bits % WORD_BITS:
                raise ValueError("Bloom size must be a positive multiple "
                                 f"of {WORD_BITS}")
            total = n * bits
            return cls(kind, 1.0, bits, 0, b, total, total)
        if k < 1:
            raise ValueError("k must be >= 1")
        total = n * k * WORD_BITS
        hashes = k if kind is SketchKind.KHASH else 1
        return cls(kind, 1.0, k * WORD_BITS, k, hashes, total, total)


def plan_budget(graph: CsrGraph, kind: SketchKind, s: float,
                b: int = 1) -> BudgetPlan:
    """Size per-vertex sketches for a fraction s of the CSR footprint."""
    kind = SketchKind(kind)
    if not 0 < s <= 1:
        raise BudgetError(f"storage budget s={s} outside (0, 1]")
    if graph.n == 0:
        raise BudgetError("cannot plan sketches for an empty graph")
    budget_bits = int(s * (graph.n + 2 * graph.m) * WORD_BITS)
    if kind is SketchKind.BLOOM:
        if b < 1:
            raise ValueError("need at least one hash function")
        bits = (budget_bits // graph.n) // WORD_BITS * WORD_BITS
        if bits < WORD_BITS:
            raise BudgetError(
                f"budget s={s} cannot fit one {WORD_BITS}-bit word per vertex")
        return BudgetPlan(kind, s, bits, 0, b, graph.n * bits, budget_bits)
    k = max(1, int(s * 2 * graph.m / graph.n))
    total = graph.n * k * WORD_BITS
    if total > budget_bits:
        raise BudgetError(
            f"budget s={s} cannot fit one {WORD_BITS}-bit entry per vertex")
    hashes = k if kind is SketchKind.KHASH else 1
    return BudgetPlan(kind, s, k * WORD_BITS, k, hashes, total, budget_bits)


# ---------------------------------------------------------------------------
# per-neighborhood sketches


@dataclass
class BloomSketch:
    words: np.ndarray          # uint64, bit_length // 64 entries
    bit_length: int
    hash_count: int
    ones: int
    seed: int = 0              # family base seed, for mismatch checks

    def recount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def contains(self, family: HashFamily, key: int) -> bool:
        """Membership check: all b bits set (no false negatives)."""
        for i in range(self.hash_count):
            pos = int(hash_words(family, i, np.asarray([key]))[0]
                      % np.uint64(self.bit_length))
            if not (self.words[pos >> 6] >> np.uint64(pos & 63)) & _UONE:
                return False
        return True


@dataclass
class KHashSketch:
    entries: np.ndarray        # int64; exactly k entries, or 0 if N_v empty
    capacity: int
    seed: int = 0


@dataclass
class OneHashSketch:
    entries: np.ndarray        # int64, sorted ascending, min(k, d_v) entries
    capacity: int
    seed: int = 0


@dataclass
class KmvSketch:
    hashes: np.ndarray         # float64 in (0,1], strictly increasing
    capacity: int
    seed: int = 0


def build_bloom(neigh, plan: BudgetPlan, family: HashFamily) -> BloomSketch:
    """Set bit h_i(x) mod B_X for every member x and every function i."""
    if plan.kind is not SketchKind.BLOOM:
        raise ValueError("plan is not a Bloom plan")
    neigh = np.asarray(neigh, dtype=np.int64)
    bits = plan.bits_per_vertex
    words = np.zeros(bits // WORD_BITS, dtype=np.uint64)
    for i in range(plan.hash_count):
        pos = bit_positions(family, i, neigh, bits)
        np.bitwise_or.at(words, pos >> 6, _UONE << (pos & 63).astype(np.uint64))
    return BloomSketch(words, bits, plan.hash_count,
                       int(np.bitwise_count(words).sum()), family.base_seed)


def build_khash(neigh, k: int, family: HashFamily) -> KHashSketch:
    """Entry i = the member minimizing h_i (smaller ID wins ties)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    neigh = np.asarray(neigh, dtype=np.int64)
    if len(neigh) == 0:
        return KHashSketch(np.empty(0, dtype=np.int64), k, family.base_seed)
    entries = np.empty(k, dtype=np.int64)
    for i in range(k):
        h = hash_words(family, i, neigh)
        # argmin returns the first minimum; neigh is ascending, so the
        # smallest ID wins hash ties.
        entries[i] = neigh[np.argmin(h)]
    return KHashSketch(entries, k, family.base_seed)


def build_onehash(neigh, k: int, family: HashFamily) -> OneHashSketch:
    """The min(k, d_v) members with the smallest h_1, as sorted IDs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    neigh = np.asarray(neigh, dtype=np.int64)
    if len(neigh) == 0:
        return OneHashSketch(np.empty(0, dtype=np.int64), k, family.base_seed)
    h = hash_words(family, 0, neigh)
    order = np.lexsort((neigh, h))[:k]
    return OneHashSketch(np.sort(neigh[order]), k, family.base_seed)


def build_kmv(neigh, k: int, family: HashFamily) -> KmvSketch:
    """The min(k, d_v) smallest distinct unit-interval hash values."""
    if k < 1:
        raise ValueError("k must be >= 1")
    neigh = np.asarray(neigh, dtype=np.int64)
    if len(neigh) == 0:
        return KmvSketch(np.empty(0, dtype=np.float64), k, family.base_seed)
    values = np.unique(unit_values(family, 0, neigh))
    return KmvSketch(values[:k], k, family.base_seed)


# ---------------------------------------------------------------------------
# whole-graph sketch sets


class SketchedGraph:
    """One sketch per vertex, stored in flat matrices for batch kernels.

    ``source`` records whether sketches cover the undirected N_v or the
    degree-ordered N+_v. ``sizes[v]`` is the exact cardinality of the
    sketched set (a CSR degree), which the estimators take as given.
    Immutable after construction; shareable across threads.
    """

    def __init__(self, kind: SketchKind, plan: BudgetPlan,
                 family: HashFamily, source: str, sizes: np.ndarray,
                 *, bit_matrix=None, ones=None, entries=None,
                 lengths=None, values=None):
        self.kind = SketchKind(kind)
        self.plan = plan
        self.family = family
        self.seed = family.base_seed
        self.source = source
        self.sizes = np.asarray(sizes, dtype=np.int64)
        self.n = len(self.sizes)
        self.bit_matrix = bit_matrix
        self.ones = ones
        self.entries = entries
        self.lengths = lengths
        self.values = values

    @property
    def capacity(self) -> int:
        return self.plan.entries_per_vertex

    @property
    def bit_length(self) -> int:
        return self.plan.bits_per_vertex

    @property
    def hash_count(self) -> int:
        return self.plan.hash_count

    def sketch(self, v: int):
        """Materialize vertex v's sketch as a standalone object."""
        if self.kind is SketchKind.BLOOM:
            return BloomSketch(self.bit_matrix[v], self.bit_length,
                               self.hash_count, int(self.ones[v]), self.seed)
        if self.kind is SketchKind.KHASH:
            row = self.entries[v]
            ent = row if self.sizes[v] > 0 else row[:0]
            return KHashSketch(ent, self.capacity, self.seed)
        if self.kind is SketchKind.ONEHASH:
            return OneHashSketch(self.entries[v, :self.lengths[v]],
                                 self.capacity, self.seed)
        return KmvSketch(self.values[v, :self.lengths[v]],
                         self.capacity, self.seed)

    def extra_bits_used(self) -> int:
        """Measured payload bits actually stored across all sketches."""
        if self.kind is SketchKind.BLOOM:
            return self.n * self.bit_length
        if self.kind is SketchKind.KHASH:
            nonempty = int(np.count_nonzero(self.sizes > 0))
            return nonempty * self.capacity * WORD_BITS
        return int(self.lengths.sum()) * WORD_BITS

    def extra_bytes_used(self) -> int:
        return self.extra_bits_used() // 8


def _segment_starts(offsets: np.ndarray) -> np.ndarray:
    return offsets[:-1]


def _build_bloom_matrix(n, offsets, adj, sizes, plan, family):
    bits = plan.bits_per_vertex
    wpr = bits // WORD_BITS
    matrix = np.zeros((n, wpr), dtype=np.uint64)
    flat = matrix.reshape(-1)
    src = np.repeat(np.arange(n, dtype=np.int64), sizes)
    for i in range(plan.hash_count):
        pos = bit_positions(family, i, adj, bits)
        np.bitwise_or.at(flat, src * wpr + (pos >> 6),
                         _UONE << (pos & 63).astype(np.uint64))
    ones = np.bitwise_count(matrix).sum(axis=1).astype(np.int64)
    return matrix, ones


def _build_khash_matrix(n, offsets, adj, sizes, k, family):
    entries = np.full((n, k), -1, dtype=np.int64)
    if len(adj) == 0:
        return entries
    starts = _segment_starts(offsets)
    valid = sizes > 0
    for i in range(k):
        h = hash_words(family, i, adj)
        h_ext = np.append(h, np.uint64(0xFFFFFFFFFFFFFFFF))
        mins = np.minimum.reduceat(h_ext, starts)
        # smallest ID among hash-tied minima
        cand = np.where(h == np.repeat(mins, sizes), adj, _INT_BIG)
        cand_ext = np.append(cand, _INT_BIG)
        ids = np.minimum.reduceat(cand_ext, starts)
        entries[valid, i] = ids[valid]
    return entries


def _select_bottom_k(offsets, sizes, primary, adj, k):
    """Per segment, indices of the k smallest (primary, adj) pairs."""
    n = len(sizes)
    src = np.repeat(np.arange(n, dtype=np.int64), sizes)
    order = np.lexsort((adj, primary, src))
    pos_in_seg = np.arange(len(adj)) - np.repeat(_segment_starts(offsets),
                                                 sizes)
    return order[pos_in_seg < k], src


def _build_onehash_matrix(n, offsets, adj, sizes, k, family):
    entries = np.full((n, k), -1, dtype=np.int64)
    lengths = np.minimum(sizes, k).astype(np.int64)
    if len(adj) == 0:
        return entries, lengths
    h = hash_words(family, 0, adj)
    sel, src = _select_bottom_k(offsets, sizes, h, adj, k)
    sel_src = src[sel]
    sel_ids = adj[sel]
    # regroup by vertex with ascending IDs inside each row
    order = np.lexsort((sel_ids, sel_src))
    sel_src, sel_ids = sel_src[order], sel_ids[order]
    row_starts = np.zeros(n, dtype=np.int64)
    row_starts[1:] = np.cumsum(lengths)[:-1]
    cols = np.arange(len(sel_ids)) - np.repeat(row_starts, lengths)
    entries[sel_src, cols] = sel_ids
    return entries, lengths


def _build_kmv_matrix(n, offsets, adj, sizes, k, family):
    values = np.full((n, k), np.inf, dtype=np.float64)
    lengths = np.zeros(n, dtype=np.int64)
    if len(adj) == 0:
        return values, lengths
    u = unit_values(family, 0, adj)
    src = np.repeat(np.arange(n, dtype=np.int64), sizes)
    order = np.lexsort((u, src))
    src_s, u_s = src[order], u[order]
    # distinct values per segment (first occurrence wins)
    first = np.ones(len(u_s), dtype=bool)
    first[1:] = (src_s[1:] != src_s[:-1]) | (u_s[1:] != u_s[:-1])
    src_d, u_d = src_s[first], u_s[first]
    counts = np.bincount(src_d, minlength=n)
    cum = np.zeros(n, dtype=np.int64)
    cum[1:] = np.cumsum(counts)[:-1]
    pos = np.arange(len(u_d)) - np.repeat(cum, counts)
    keep = pos < k
    src_k, u_k, pos_k = src_d[keep], u_d[keep], pos[keep]
    values[src_k, pos_k] = u_k
    lengths = np.minimum(counts, k).astype(np.int64)
    return values, lengths


def build_sketched_graph(graph: CsrGraph, kind: SketchKind, s: float,
                         b: int = 1, seed: int = DEFAULT_HASH_SEED,
                         *, source: str = "undirected",
                         view: DirectedView | None = None,
                         k_override: int | None = None,
                         bits_override: int | None = None) -> SketchedGraph:
    """Sketch every vertex neighborhood of a graph under a budget.

    ``source`` selects the sketched sets: "undirected" for N_v,
    "directed" for the degree-ordered N+_v (``view`` is computed when not
    supplied). ``b`` is the Bloom hash count and is ignored by the other
    kinds. ``k_override`` (MinHash/KMV capacity) and ``bits_override``
    (Bloom width) bypass the budget rule, e.g. for exact-recovery setups.
    Deterministic for a fixed seed; a planning failure propagates as
    ``BudgetError``.
    """
    kind = SketchKind(kind)
    if source == "undirected":
        offsets, adj = graph.offsets, graph.adjacency
    elif source == "directed":
        if view is None:
            view = degree_order(graph)
        offsets, adj = view.offsets, view.adjacency
    else:
        raise ValueError("source must be 'undirected' or 'directed'")
    sizes = np.diff(offsets)
    if kind is SketchKind.BLOOM and bits_override is not None:
        plan = BudgetPlan.explicit(kind, graph.n, bits=bits_override, b=b)
    elif kind is not SketchKind.BLOOM and k_override is not None:
        plan = BudgetPlan.explicit(kind, graph.n, k=k_override)
    else:
        plan = plan_budget(graph, kind, s, b)
    fam_count = plan.hash_count
    family = HashFamily(base_seed=seed, count=fam_count)
    n = graph.n
    if kind is SketchKind.BLOOM:
        matrix, ones = _build_bloom_matrix(n, offsets, adj, sizes, plan,
                                           family)
        return SketchedGraph(kind, plan, family, source, sizes,
                             bit_matrix=matrix, ones=ones)
    k = plan.entries_per_vertex
    if kind is SketchKind.KHASH:
        entries = _build_khash_matrix(n, offsets, adj, sizes, k, family)
        return SketchedGraph(kind, plan, family, source, sizes,
                             entries=entries)
    if kind is SketchKind.ONEHASH:
        entries, lengths = _build_onehash_matrix(n, offsets, adj, sizes, k,
                                                 family)
        return SketchedGraph(kind, plan, family, source, sizes,
                             entries=entries, lengths=lengths)
    values, lengths = _build_kmv_matrix(n, offsets, adj, sizes, k, family)
    return SketchedGraph(kind, plan, family, source, sizes,
                         values=values, lengths=lengths)


# ---------------------------------------------------------------------------
# binary dump / restore

_MAGIC = b"PGSKETCH"
_VERSION = 1
_KIND_CODES = {SketchKind.BLOOM: 0, SketchKind.KHASH: 1,
               SketchKind.ONEHASH: 2, SketchKind.KMV: 3}
_SOURCE_CODES = {"undirected": 0, "directed": 1}


def dump_sketches(sg: SketchedGraph, path) -> None:
    """Write a versioned little-endian binary dump of all sketches."""
    header = struct.pack(
        "<8sHBBIQQQdQQ", _MAGIC, _VERSION, _KIND_CODES[sg.kind],
        _SOURCE_CODES[sg.source], sg.plan.hash_count, sg.n,
        sg.bit_length if sg.kind is SketchKind.BLOOM else sg.capacity,
        sg.seed, sg.plan.s, sg.plan.total_bits, sg.plan.budget_bits)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(sg.sizes.astype("<i8").tobytes())
        if sg.kind is SketchKind.BLOOM:
            fh.write(sg.ones.astype("<i8").tobytes())
            fh.write(sg.bit_matrix.astype("<u8").tobytes())
        elif sg.kind is SketchKind.KHASH:
            fh.write(sg.entries.astype("<i8").tobytes())
        elif sg.kind is SketchKind.ONEHASH:
            fh.write(sg.lengths.astype("<i8").tobytes())
            fh.write(sg.entries.astype("<i8").tobytes())
        else:
            fh.write(sg.lengths.astype("<i8").tobytes())
            fh.write(sg.values.astype("<f8").tobytes())


def load_sketches(path) -> SketchedGraph:
    """Restore a ``dump_sketches`` file; validates magic and version."""
    with open(path, "rb") as fh:
        head = fh.read(struct.calcsize("<8sHBBIQQQdQQ"))
        (magic, version, kind_code, source_code, hash_count, n, param,
         seed, s, total_bits, budget_bits) = struct.unpack("<8sHBBIQQQdQQ",
                                                           head)
        if magic != _MAGIC:
            raise ValueError("not a sketch dump")
        if version != _VERSION:
            raise ValueError(f"unsupported sketch dump version {version}")
        kind = {v: k for k, v in _KIND_CODES.items()}[kind_code]
        source = {v: k for k, v in _SOURCE_CODES.items()}[source_code]
        sizes = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int64)
        if kind is SketchKind.BLOOM:
            plan = BudgetPlan(kind, s, param, 0, hash_count,
                              total_bits, budget_bits)
        else:
            plan = BudgetPlan(kind, s, param * WORD_BITS, param, hash_count,
                              total_bits, budget_bits)
        family = HashFamily(base_seed=seed, count=hash_count)
        if kind is SketchKind.BLOOM:
            ones = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int64)
            wpr = param // WORD_BITS
            matrix = np.frombuffer(fh.read(8 * n * wpr), dtype="<u8")
            matrix = matrix.astype(np.uint64).reshape(n, wpr)
            return SketchedGraph(kind, plan, family, source, sizes,
                                 bit_matrix=matrix, ones=ones)
        k = param
        if kind is SketchKind.KHASH:
            entries = np.frombuffer(fh.read(8 * n * k), dtype="<i8")
            entries = entries.astype(np.int64).reshape(n, k)
            return SketchedGraph(kind, plan, family, source, sizes,
                                 entries=entries)
        lengths = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int64)
        if kind is SketchKind.ONEHASH:
            entries = np.frombuffer(fh.read(8 * n * k), dtype="<i8")
            entries = entries.astype(np.int64).reshape(n, k)
            return SketchedGraph(kind, plan, family, source, sizes,
                                 entries=entries, lengths=lengths)
        values = np.frombuffer(fh.read(8 * n * k), dtype="<f8")
        values = values.astype(np.float64).reshape(n, k)
        return SketchedGraph(kind, plan, family, source, sizes,
                             values=values, lengths=lengths)
