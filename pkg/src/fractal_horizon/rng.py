"""SplitMix64 streams.

SplitMix64 keeps a single 64-bit state and advances it by the golden-ratio
increment ``0x9E3779B97F4A7C15``; output ``k`` (0-based) of a stream seeded
with ``s`` is ``mix(s + (k + 1) * gamma)`` taken modulo 2**64, where::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Because the state update is a plain counter, any slice of the stream can be
produced directly, which is what the vectorised helpers below do. Doubles
are ``(z >> 11) * 2**-53`` so the same seed reproduces the same fixtures in
any language with 64-bit unsigned arithmetic.
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the stream seeded with ``seed``."""
    if count < 0 or start < 0:
        raise ValueError("count and start must be non-negative")
    base = np.uint64(seed & MASK64)
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = base + k * np.uint64(GAMMA)
        return _mix(state)


def uniform(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits each."""
    z = splitmix64(seed, count, start)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def derive_seed(seed: int, *tags: int) -> int:
    """Child seed for an independent sub-stream (e.g. one per fixture)."""
    s = seed & MASK64
    for t in tags:
        s = int(splitmix64(s ^ (t & MASK64), 1)[0])
    return s


class SplitMix64:
    """Sequential view over a SplitMix64 stream.

    >>> r = SplitMix64(0)
    >>> hex(r.next_uint64())
    '0xe220a8397b1dcdaf'
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.position = 0

    def next_uint64(self) -> int:
        return int(self.uint64(1)[0])

    def uint64(self, count: int) -> np.ndarray:
        out = splitmix64(self.seed, count, self.position)
        self.position += count
        return out

    def uniform(self, count: int) -> np.ndarray:
        out = uniform(self.seed, count, self.position)
        self.position += count
        return out
