"""Deterministic random streams for fixtures that must be reproducible.

All randomness in this package flows through a SplitMix64 generator seeded
by a documented key-derivation scheme, so that two runs (or two independent
implementations of the same scheme) produce byte-identical artifacts.

Key derivation: the key parts are folded into an FNV-1a 64-bit hash, each
part followed by a 0x1F separator byte. Integers contribute their value
mod 2^64 as 8 little-endian bytes, strings their UTF-8 bytes, and None the
single byte 0xFF. The digest is passed once through the SplitMix64 mixing
function to obtain the stream seed.

Gaussian draws use one Box-Muller evaluation per value:
    z = sqrt(-2 ln u1) * cos(2 pi u2)
with u1 in (0, 1] and u2 in [0, 1), each built from the top 53 bits of one
SplitMix64 output. Bounded integers use rejection sampling on the raw
64-bit stream (no modulo bias).
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def fnv1a64(data: bytes, h: int = _FNV_OFFSET) -> int:
    """FNV-1a 64-bit hash of ``data``, optionally continuing from ``h``."""
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def derive_key(*parts: int | str | None) -> int:
    """Fold a tuple of ints/strings/None into one 64-bit stream seed."""
    h = _FNV_OFFSET
    for part in parts:
        if part is None:
            data = b"\xff"
        elif isinstance(part, int):
            data = (part & _MASK64).to_bytes(8, "little")
        elif isinstance(part, str):
            data = part.encode("utf-8")
        else:
            raise TypeError(f"unsupported key part type: {type(part).__name__}")
        h = fnv1a64(data + b"\x1f", h)
    return mix64(h)


class SplitMix64:
    """Counter-based SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return mix64(self._state)

    def next_unit(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_unit_open(self) -> float:
        """Uniform double in (0, 1]; safe as a log argument."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def next_gauss(self) -> float:
        """Standard normal draw (single Box-Muller evaluation)."""
        u1 = self.next_unit_open()
        u2 = self.next_unit()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n


def sample_indices(n: int, k: int, stream: SplitMix64) -> list[int]:
    """Choose k of n indices uniformly without replacement.

    Partial Fisher-Yates over range(n); the result is returned sorted so
    callers keep their canonical ordering after subsampling.
    """
    if k >= n:
        return list(range(n))
    pool = list(range(n))
    for i in range(k):
        j = i + stream.next_below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])
