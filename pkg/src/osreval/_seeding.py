"""Portable counter-based sub-seeding.

Every random decision in the toolkit is keyed by a tuple of integers
(master seed, config index, repetition index, role tag, ...) and mixed with
the SplitMix64 finalizer (Steele, Lea & Flood 2014; constants as in
Vigna's reference ``splitmix64.c``)::

    h = splitmix64(seed)
    for key in keys:
        h = splitmix64(h ^ key)

String role tags are mapped to integers with CRC-32 (``zlib.crc32`` of the
UTF-8 bytes).  Label-level sampling (plans, folds) runs on a pure-Python
SplitMix64 stream so serialized plans do not depend on numpy's generator
internals.  The scheme is frozen: changing it changes every published plan.
"""
from __future__ import annotations

import zlib
from typing import Iterable, MutableSequence, TypeVar

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

T = TypeVar("T")


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def splitmix64(x: int) -> int:
    return _finalize((x + GOLDEN_GAMMA) & MASK64)


def role_tag(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def derive_seed(seed: int, *keys: int | str) -> int:
    """Mix ``seed`` with ``keys`` into an independent 64-bit sub-seed."""
    h = splitmix64(int(seed) & MASK64)
    for key in keys:
        k = role_tag(key) if isinstance(key, str) else int(key)
        h = splitmix64(h ^ (k & MASK64))
    return h


def derive_seed_array(seed: int, prefix: Iterable[int | str], counters: np.ndarray,
                      suffix: Iterable[int | str] = ()) -> np.ndarray:
    """Vectorized ``derive_seed(seed, *prefix, c, *suffix)`` for every c in ``counters``.

    Bit-identical to the scalar version.
    """
    base = np.uint64(derive_seed(seed, *prefix))
    h = _splitmix64_vec(base ^ np.asarray(counters, dtype=np.uint64))
    for key in suffix:
        k = role_tag(key) if isinstance(key, str) else int(key)
        h = _splitmix64_vec(h ^ np.uint64(k & MASK64))
    return h


def _splitmix64_vec(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def to_unit_interval(h: np.ndarray) -> np.ndarray:
    """Map 64-bit hashes to floats strictly inside (0, 1)."""
    top = (np.asarray(h, dtype=np.uint64) >> np.uint64(11)).astype(np.float64)
    return (top + 0.5) * 2.0 ** -53


def numpy_generator(seed: int, *keys: int | str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *keys)))


class SplitMix64Stream:
    """Minimal deterministic stream used for label and fold sampling."""

    def __init__(self, seed: int):
        self._state = int(seed) & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return _finalize(self._state)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        # rejection sampling keeps the draw exactly uniform
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items: MutableSequence[T]) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: list[T], k: int) -> list[T]:
        pool = list(items)
        self.shuffle(pool)
        return pool[:k]
