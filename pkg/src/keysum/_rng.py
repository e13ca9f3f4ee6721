"""Self-contained deterministic randomness for shuffles and derangements.

The stdlib random module is deliberately not used: results here must be
reproducible from a seed forever, pinned by this file alone rather than by
the interpreter version. The generator is SplitMix64, which is trivially
seedable and passes the statistical tests that matter for shuffling.
"""

from __future__ import annotations

import hashlib
from typing import Sequence, TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def subseed(seed: int, *parts: object) -> int:
    """Derive an independent 64-bit seed for a keyed subtask.

    Hashing rather than arithmetic keeps distinct keys from producing
    correlated streams.
    """
    digest = hashlib.sha256(repr((seed, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def shuffled(items: Sequence[T], rng: SplitMix64) -> list[T]:
    """Fisher-Yates shuffle; the input is not modified."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randbelow(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def derangement(items: Sequence[T], rng: SplitMix64, max_attempts: int = 1000) -> list[T]:
    """Permute items so no element stays at its own index.

    Strategy: reshuffle until fixed-point free (expected under three tries),
    falling back to a rotation by one after max_attempts so termination is
    guaranteed. Requires at least two distinct positions to succeed.
    """
    if len(items) < 2:
        raise ValueError("derangement needs at least 2 items")
    for _ in range(max_attempts):
        perm = shuffled(items, rng)
        if all(perm[i] != items[i] for i in range(len(items))):
            return perm
    return list(items[1:]) + [items[0]]
