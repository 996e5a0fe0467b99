"""Cardinality and intersection estimators over sketches, plus the
closed-form accuracy-bound calculators.

Estimator conventions (applied throughout):

  * all logs are natural, all arithmetic is 64-bit floating point;
  * the log-occupancy (Swamidass) single-set estimate uses the saturation
    fix: the ones count is decremented by one when the filter is full, so
    the estimate stays finite;
  * the union-based Bloom (OR) and KMV intersection estimates can come out
    negative; they are clamped to the valid range for algorithm
    consumption, with the raw value available via ``clamp=False``;
  * the Jaccard estimate of two empty sketches is defined as 0;
  * the k-Hash Jaccard estimate counts positional matches (entry i versus
    entry i), matching its Binomial sampling model; the 1-Hash variant
    counts common IDs;
  * degrees |X| and |Y| are always the exact CSR degrees (they are free
    in the graph setting), never estimated sizes.

Bound calculators return a :class:`BoundResult`; queries outside a
bound's validity regime are flagged and produce no number.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .setops import intersect_merge
from .sketches import (BloomSketch, KHashSketch, KmvSketch, OneHashSketch)

__all__ = [
    "EstimatorKind",
    "est_single_swamidass",
    "est_single_delta_class",
    "est_intersection_bf_and",
    "est_intersection_bf_limit",
    "est_intersection_bf_or",
    "est_jaccard_minhash",
    "est_intersection_minhash",
    "est_intersection_kmv",
    "BoundQuery",
    "BoundResult",
    "bound_bf_mse",
    "bound_minhash_tail",
    "bound_tc",
    "bound_tc_from_query",
]


class EstimatorKind(str, enum.Enum):
    EXACT_MERGE = "exact_merge"
    EXACT_GALLOP = "exact_gallop"
    BF_AND = "bf_and"
    BF_L = "bf_l"
    BF_OR = "bf_or"
    KHASH = "khash"
    ONEHASH = "onehash"
    KMV = "kmv"


def swamidass_value(bit_length, hash_count, ones):
    """-(B/b) * ln(1 - ones~/B) with the saturation fix; array friendly."""
    ones = np.asarray(ones, dtype=np.float64)
    adjusted = ones - (ones == bit_length)
    out = -(bit_length / hash_count) * np.log1p(-adjusted / bit_length)
    return out if out.ndim else float(out)


def est_single_swamidass(sketch: BloomSketch) -> float:
    """Log-occupancy cardinality estimate from a Bloom sketch."""
    return swamidass_value(sketch.bit_length, sketch.hash_count, sketch.ones)


def est_single_delta_class(ones: int, delta: float) -> float:
    """Linear rescaling estimate delta * ones.

    With delta = 1/b this is the large-filter limit of the log-occupancy
    estimate (it rescales the number of ones by 1/b).
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return float(delta * ones)


def _check_bloom_pair(sx: BloomSketch, sy: BloomSketch) -> None:
    if (sx.bit_length != sy.bit_length or sx.hash_count != sy.hash_count
            or sx.seed != sy.seed):
        raise ValueError("Bloom sketches have mismatched parameters")


def est_intersection_bf_and(sx: BloomSketch, sy: BloomSketch) -> float:
    """Intersection estimate from the popcount of the bitwise AND."""
    _check_bloom_pair(sx, sy)
    ones = int(np.bitwise_count(sx.words & sy.words).sum())
    return swamidass_value(sx.bit_length, sx.hash_count, ones)


def est_intersection_bf_limit(sx: BloomSketch, sy: BloomSketch) -> float:
    """Large-filter limiting estimate: popcount(AND) / b."""
    _check_bloom_pair(sx, sy)
    ones = int(np.bitwise_count(sx.words & sy.words).sum())
    return ones / sx.hash_count


def est_intersection_bf_or(sx: BloomSketch, sy: BloomSketch,
                           size_x: int, size_y: int,
                           clamp: bool = True) -> float:
    """Union-complement estimate |X| + |Y| - est(|X u Y|) via bitwise OR.

    May be negative; clamped to 0 unless ``clamp=False``.
    """
    _check_bloom_pair(sx, sy)
    ones = int(np.bitwise_count(sx.words | sy.words).sum())
    raw = size_x + size_y - swamidass_value(sx.bit_length, sx.hash_count,
                                            ones)
    return max(0.0, raw) if clamp else raw


def _jaccard_khash(mx: KHashSketch, my: KHashSketch) -> float:
    if mx.capacity != my.capacity:
        raise ValueError("k-Hash sketches have mismatched k")
    if len(mx.entries) == 0 and len(my.entries) == 0:
        return 0.0
    if len(mx.entries) == 0 or len(my.entries) == 0:
        return 0.0
    matches = int(np.count_nonzero(mx.entries == my.entries))
    return matches / mx.capacity


def _jaccard_onehash(mx: OneHashSketch, my: OneHashSketch) -> float:
    if mx.capacity != my.capacity:
        raise ValueError("1-Hash sketches have mismatched k")
    lx, ly = len(mx.entries), len(my.entries)
    if lx == 0 and ly == 0:
        return 0.0
    common = intersect_merge(mx.entries, my.entries)
    # Entry sets are the full neighborhoods whenever they are not filled
    # to capacity, so dividing by the (capped) entry-union size keeps
    # small-set pairs exact while reducing to 1/k for full sketches.
    denom = min(mx.capacity, lx + ly - common)
    return common / denom if denom else 0.0


def est_jaccard_minhash(mx, my) -> float:
    """Jaccard similarity estimate from a pair of MinHash sketches."""
    if isinstance(mx, KHashSketch) and isinstance(my, KHashSketch):
        return _jaccard_khash(mx, my)
    if isinstance(mx, OneHashSketch) and isinstance(my, OneHashSketch):
        return _jaccard_onehash(mx, my)
    raise TypeError("need two k-Hash or two 1-Hash sketches of equal kind")


def est_intersection_minhash(mx, my, size_x: int, size_y: int) -> float:
    """Intersection estimate (J / (1 + J)) * (|X| + |Y|).

    For 1-Hash sketches whose neighborhoods both fit within capacity the
    entry lists are the exact sets, and the exact common count is
    returned (the formula reduces to it).
    """
    if isinstance(mx, OneHashSketch) and isinstance(my, OneHashSketch):
        if size_x <= mx.capacity and size_y <= my.capacity:
            return float(intersect_merge(mx.entries, my.entries))
    j = est_jaccard_minhash(mx, my)
    return (j / (1.0 + j)) * (size_x + size_y)


def est_intersection_kmv(kx: KmvSketch, ky: KmvSketch,
                         size_x: int, size_y: int,
                         clamp: bool = True) -> float:
    """Intersection estimate |X| + |Y| - (k-1)/max(K_{X u Y}).

    The union sketch keeps the min(k_X, k_Y) smallest distinct values of
    the two hash lists. When both neighborhoods fit within capacity the
    stored values are the complete hashed sets and the union count is
    exact. A union sketch with fewer than two values degenerates to
    counting common stored hashes. Results are clamped into
    [0, min(|X|, |Y|)] unless ``clamp=False``.
    """
    if kx.capacity != ky.capacity:
        raise ValueError("KMV sketches have mismatched k")
    cap = kx.capacity
    lx, ly = len(kx.hashes), len(ky.hashes)
    if size_x <= cap and size_y <= cap:
        union = len(np.union1d(kx.hashes, ky.hashes))
        raw = float(size_x + size_y - union)
    else:
        k_eff = min(lx, ly)
        if k_eff < 2:
            raw = float(len(np.intersect1d(kx.hashes, ky.hashes)))
        else:
            union = np.union1d(kx.hashes, ky.hashes)[:k_eff]
            est_union = (k_eff - 1) / union[-1]
            raw = size_x + size_y - est_union
    if not clamp:
        return raw
    return float(min(max(raw, 0.0), min(size_x, size_y)))


# ---------------------------------------------------------------------------
# bound calculators


@dataclass(frozen=True)
class BoundQuery:
    """Parameters for a closed-form accuracy bound.

    Only the fields a given bound uses need to be set: Bloom bounds read
    (bit_length, hash_count, intersection); MinHash bounds read
    (k, size_x, size_y); the triangle-count bounds additionally read
    (edge_count, max_degree, sum_d2, sum_d3); ``t`` is the deviation
    distance.
    """

    kind: EstimatorKind = EstimatorKind.BF_AND
    bit_length: int = 0
    hash_count: int = 1
    k: int = 0
    size_x: int = 0
    size_y: int = 0
    intersection: int = 0
    union: int = 0
    edge_count: int = 0
    max_degree: int = 0
    sum_d2: int = 0
    sum_d3: int = 0
    t: float | None = None


@dataclass(frozen=True)
class BoundResult:
    value: float | None
    in_regime: bool
    detail: str = ""


def _bf_mse_value(bit_length: int, hash_count: int, c: int) -> float:
    b, big_b = hash_count, bit_length
    return (math.exp(c * b / (big_b - 1)) * big_b / b**2
            - big_b / b**2 - c / b)


def bound_bf_mse(q: BoundQuery) -> BoundResult:
    """Mean-squared-error bound for the Bloom AND intersection estimate.

    Valid when b <= sqrt(B) and b * |X n Y| <= 0.499 * B * ln(B); queries
    outside that regime are flagged and get no number. With ``t`` set,
    returns the Chebyshev deviation-probability form min(1, MSE / t^2).
    """
    b, big_b, c = q.hash_count, q.bit_length, q.intersection
    if big_b < 2 or b < 1 or c < 0:
        return BoundResult(None, False, "need B >= 2, b >= 1, c >= 0")
    if b > math.sqrt(big_b):
        return BoundResult(None, False,
                           f"out of regime: b={b} > sqrt(B)={math.sqrt(big_b):.2f}")
    limit = 0.499 * big_b * math.log(big_b)
    if b * c > limit:
        return BoundResult(None, False,
                           f"out of regime: b*c={b * c} > 0.499*B*ln(B)={limit:.1f}")
    mse = _bf_mse_value(big_b, b, c)
    if q.t is None:
        return BoundResult(mse, True)
    if q.t == 0:
        return BoundResult(1.0, True, "t=0 clamps to 1")
    return BoundResult(min(1.0, mse / q.t**2), True)


def bound_minhash_tail(k: int, size_x: int, size_y: int, t: float) -> float:
    """Exponential deviation bound min(1, 2 exp(-2kt^2 / (|X|+|Y|)^2)).

    Holds for both the k-Hash and the 1-Hash intersection estimators.
    """
    if k < 1 or t < 0:
        raise ValueError("need k >= 1 and t >= 0")
    denom = float(size_x + size_y) ** 2
    if denom == 0:
        return 1.0
    return min(1.0, 2.0 * math.exp(-2.0 * k * t * t / denom))


def bound_tc(kind: EstimatorKind, *, m: int, max_degree: int,
             sum_d2: int = 0, sum_d3: int = 0, bit_length: int = 0,
             hash_count: int = 1, k: int = 0, t: float,
             variant: str = "sum_d2") -> BoundResult:
    """Deviation-probability bound for the summed triangle-count estimate.

    Bloom (``BF_AND``): (2 m^2 / (9 t^2)) * mse-term(Delta), gated on
    b * Delta <= 0.499 * B * ln(B). MinHash (``KHASH``/``ONEHASH``),
    ``variant="sum_d2"``: 2 exp(-18 k t^2 / (sum d^2)^2);
    ``variant="degree"``: 2 exp(-9 k t^2 / (4 (Delta+1) sum d^3)).
    All outputs are probabilities clamped to [0, 1]; t = 0 yields 1.
    """
    kind = EstimatorKind(kind)
    if t < 0:
        raise ValueError("t must be >= 0")
    if kind is EstimatorKind.BF_AND:
        if bit_length < 2 or hash_count < 1:
            return BoundResult(None, False, "need B >= 2 and b >= 1")
        limit = 0.499 * bit_length * math.log(bit_length)
        if hash_count * max_degree > limit:
            return BoundResult(
                None, False,
                f"out of regime: b*Delta={hash_count * max_degree} > "
                f"0.499*B*ln(B)={limit:.1f}")
        if t == 0:
            return BoundResult(1.0, True, "t=0 clamps to 1")
        mse = _bf_mse_value(bit_length, hash_count, max_degree)
        return BoundResult(min(1.0, 2.0 * m**2 * mse / (9.0 * t * t)), True)
    if kind in (EstimatorKind.KHASH, EstimatorKind.ONEHASH):
        if k < 1:
            return BoundResult(None, False, "need k >= 1")
        if t == 0:
            return BoundResult(1.0, True, "t=0 clamps to 1")
        if variant == "sum_d2":
            if sum_d2 <= 0:
                return BoundResult(None, False, "need sum_d2 > 0")
            expo = -18.0 * k * t * t / float(sum_d2) ** 2
        elif variant == "degree":
            if sum_d3 <= 0:
                return BoundResult(None, False, "need sum_d3 > 0")
            expo = -9.0 * k * t * t / (4.0 * (max_degree + 1) * sum_d3)
        else:
            raise ValueError("variant must be 'sum_d2' or 'degree'")
        return BoundResult(min(1.0, 2.0 * math.exp(expo)), True)
    return BoundResult(None, False, f"no triangle-count bound for {kind}")


def bound_tc_from_query(q: BoundQuery, variant: str = "sum_d2") -> BoundResult:
    """``bound_tc`` driven by a :class:`BoundQuery`."""
    return bound_tc(q.kind, m=q.edge_count, max_degree=q.max_degree,
                    sum_d2=q.sum_d2, sum_d3=q.sum_d3,
                    bit_length=q.bit_length, hash_count=q.hash_count,
                    k=q.k, t=q.t if q.t is not None else 0.0,
                    variant=variant)
