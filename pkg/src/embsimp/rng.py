"""Deterministic 64-bit randomness primitives.

Corpus splitting and the toy encoder both need randomness that is
reproducible across platforms and languages, so everything here is spelled
out rather than delegated to a platform RNG: splitmix64 for the stream,
Fisher-Yates for shuffling, and a byte-folding mix for n-gram hashing.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


class SplitMix64:
    """splitmix64 sequence: state advances by the golden gamma, output is mix64."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def next_below(self, bound: int) -> int:
        # Plain modulo draw. The bias is negligible at corpus sizes and the
        # formula stays trivially portable.
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound


def shuffled_indices(n: int, seed: int) -> list[int]:
    """Permutation of range(n) via Fisher-Yates driven by SplitMix64(seed)."""
    order = list(range(n))
    rng = SplitMix64(seed)
    for i in range(n - 1, 0, -1):
        j = rng.next_below(i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def hash_bytes(seed: int, data: bytes) -> int:
    """64-bit hash of (seed, data): fold each byte through mix64."""
    h = mix64((seed & _MASK64) ^ _GOLDEN)
    for b in data:
        h = mix64(h ^ b)
    return h
