"""Seeded hash-function families over vertex IDs.

Every sketch in this library is driven by a family of b (or k) hash
functions derived from one 64-bit base seed. The mixing algorithm is fixed
and fully documented here so that sketches are bit-reproducible across
runs, platforms, and languages:

  * ``mix64(x)`` is a 64-bit avalanche finalizer (the MurmurHash3-style
    xor-shift/multiply finalizer): ``x ^= x>>33; x *= C1; x ^= x>>33;
    x *= C2; x ^= x>>33`` with C1=0xff51afd7ed558ccd,
    C2=0xc4ceb9fe1a85ec53. All arithmetic is mod 2**64.
  * the seed of function i is ``mix64(base_seed XOR mix64(i + 1))`` --
    mix64 is a bijection, so distinct indices always get distinct derived
    seeds, and pre-mixing the index keeps families with nearby base seeds
    from sharing functions.
  * the hash word of a key under function i is ``mix64(seed_i XOR key)``.
  * bit positions are ``word mod range`` (modulo bias is negligible for
    ranges far below 2**64).
  * unit-interval values are ``(word + 1) / 2**64``, which lands in
    (0, 1]: the all-zero word maps to 2**-64, the all-ones word to 1.0.

Functions are stateless after construction and safe for unrestricted
concurrent use. Scalar paths use plain Python integers; vector paths
operate on uint64 numpy arrays with wrapping arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_HASH_SEED",
    "HashFamily",
    "hash_to_bit",
    "hash_to_unit",
    "hash_words",
    "bit_positions",
    "unit_values",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
_C1 = 0xFF51AFD7ED558CCD
_C2 = 0xC4CEB9FE1A85EC53

#: Default base seed used by the CLI when ``hash_seed`` is not configured.
DEFAULT_HASH_SEED = 0x9E3779B97F4A7C15

_U33 = np.uint64(33)
_UC1 = np.uint64(_C1)
_UC2 = np.uint64(_C2)
_TWO64 = float(2**64)


def _mix64(x: int) -> int:
    """64-bit avalanche finalizer on a plain Python integer."""
    x &= _MASK64
    x ^= x >> 33
    x = (x * _C1) & _MASK64
    x ^= x >> 33
    x = (x * _C2) & _MASK64
    x ^= x >> 33
    return x


def _mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized mix64; input is copied and treated as uint64."""
    x = np.asarray(x).astype(np.uint64, copy=True)
    x ^= x >> _U33
    x *= _UC1
    x ^= x >> _U33
    x *= _UC2
    x ^= x >> _U33
    return x


@dataclass(frozen=True)
class HashFamily:
    """A family of ``count`` deterministic hash functions.

    Function i is fully determined by (algorithm, base_seed, i); repeated
    evaluation of the same key yields identical output.
    """

    base_seed: int = DEFAULT_HASH_SEED
    count: int = 1
    algorithm: str = "mix64"
    _seeds: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        if self.algorithm != "mix64":
            raise ValueError(f"unknown hash algorithm {self.algorithm!r}")
        if self.count < 1:
            raise ValueError("hash family needs at least one function")
        base = self.base_seed & _MASK64
        object.__setattr__(self, "base_seed", base)
        seeds = tuple(_mix64(base ^ _mix64(i + 1))
                      for i in range(self.count))
        object.__setattr__(self, "_seeds", seeds)

    def seed(self, i: int) -> int:
        """Derived seed of function i."""
        self._check_index(i)
        return self._seeds[i]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.count:
            raise IndexError(
                f"hash function index {i} out of range for family of {self.count}"
            )


def hash_words(family: HashFamily, i: int, keys) -> np.ndarray:
    """Raw 64-bit hash words of an array of keys under function i."""
    family._check_index(i)
    keys = np.asarray(keys, dtype=np.int64).astype(np.uint64)
    return _mix64_array(np.uint64(family._seeds[i]) ^ keys)


def hash_to_bit(family: HashFamily, i: int, key: int, range_: int) -> int:
    """Map a key to a bit index in [0, range_) under function i."""
    if range_ < 1:
        raise ValueError("range must be >= 1")
    family._check_index(i)
    return _mix64(family._seeds[i] ^ (key & _MASK64)) % range_


def hash_to_unit(family: HashFamily, i: int, key: int) -> float:
    """Map a key to a real in (0, 1] under function i.

    The mapping is (word + 1) / 2**64, so the output is never 0. The
    division is an exact power-of-two scaling, which keeps the scalar and
    vectorized paths bit-identical.
    """
    family._check_index(i)
    w = _mix64(family._seeds[i] ^ (key & _MASK64))
    return float(w + 1) * 2.0**-64


def bit_positions(family: HashFamily, i: int, keys, range_: int) -> np.ndarray:
    """Vectorized ``hash_to_bit`` returning int64 positions."""
    if range_ < 1:
        raise ValueError("range must be >= 1")
    return (hash_words(family, i, keys) % np.uint64(range_)).astype(np.int64)


def unit_values(family: HashFamily, i: int, keys) -> np.ndarray:
    """Vectorized ``hash_to_unit`` returning float64 values in (0, 1]."""
    w = hash_words(family, i, keys)
    out = (w + np.uint64(1)).astype(np.float64)  # wraps to 0 only at 2**64-1
    out[w == np.uint64(_MASK64)] = _TWO64
    return out * 2.0**-64
