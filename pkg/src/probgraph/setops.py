"""Exact sorted-set intersection cardinality: merge and galloping.

These are the comparison baselines for every sketch estimator. Inputs are
sorted, duplicate-free integer arrays (CSR neighborhood slices qualify).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "intersect_merge",
    "intersect_gallop",
    "select_strategy",
    "intersect_count",
    "intersect_members",
]

#: Above this size ratio, galloping beats the linear merge.
GALLOP_RATIO = 32


def intersect_merge(a, b) -> int:
    """|a ∩ b| by merging two sorted runs; O(|a| + |b|).

    The concatenation of two sorted duplicate-free arrays is sorted by a
    single stable-merge pass; shared elements then sit in adjacent slots.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return 0
    merged = np.concatenate((a, b))
    merged.sort(kind="stable")
    return int(np.count_nonzero(merged[1:] == merged[:-1]))


def intersect_gallop(small, large) -> int:
    """|small ∩ large| by binary-searching each element of the smaller
    array in the larger one; O(|small| log |large|). Swaps automatically
    if called with the arguments the other way round.
    """
    small = np.asarray(small, dtype=np.int64)
    large = np.asarray(large, dtype=np.int64)
    if len(small) > len(large):
        small, large = large, small
    if len(small) == 0:
        return 0
    pos = np.searchsorted(large, small)
    valid = pos < len(large)
    return int(np.count_nonzero(large[pos[valid]] == small[valid]))


def select_strategy(da: int, db: int, threshold: int = GALLOP_RATIO) -> str:
    """Pick 'merge' or 'gallop' from the two set sizes.

    Galloping pays off only when one set dwarfs the other; degenerate
    empty inputs always take the merge path (it returns 0 instantly).
    """
    lo, hi = (da, db) if da <= db else (db, da)
    if lo == 0:
        return "merge"
    return "gallop" if hi / lo > threshold else "merge"


def intersect_count(a, b, threshold: int = GALLOP_RATIO) -> int:
    """Exact |a ∩ b| using the strategy picked by ``select_strategy``."""
    if select_strategy(len(a), len(b), threshold) == "gallop":
        return intersect_gallop(a, b)
    return intersect_merge(a, b)


def intersect_members(a, b) -> np.ndarray:
    """The sorted common elements themselves (not just the count)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return np.intersect1d(a, b, assume_unique=True)
