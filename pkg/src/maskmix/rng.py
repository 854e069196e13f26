"""Portable 64-bit RNG used for mask sampling and batch ordering.

The generator is a SplitMix64 stream with Fisher-Yates shuffling on top.
Both are written out explicitly (no library RNG) so that any
implementation, in any language, can reproduce the exact same masks and
batch orders from the same integer seed:

  state <- (state + 0x9E3779B97F4A7C15) mod 2^64
  z <- state
  z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
  z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
  output <- z XOR (z >> 31)

Bounded draws use rejection sampling (no modulo bias), and shuffles are
backward Fisher-Yates: for i = n-1 .. 1, swap(a[i], a[j]) with
j = next_below(i + 1).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator; one instance per logical stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.next_below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def sample(self, n: int, k: int) -> list[int]:
        """First k entries of a permutation of range(n), without replacement."""
        if k > n:
            raise ValueError(f"cannot sample {k} of {n} without replacement")
        return self.permutation(n)[:k]


def round_half_up(x: float) -> int:
    """round(x) with halves going up; used wherever a fractional count
    of patches must become an exact integer."""
    import math

    return int(math.floor(x + 0.5))
