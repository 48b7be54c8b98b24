"""Deterministic 64-bit linear congruential generator.

Fixed constants (Knuth's MMIX multiplier), so seeded reports are portable
across platforms and Python versions:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64

Doubles are drawn from the top 53 bits.
"""

from __future__ import annotations

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg:
    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & _MASK
        self.next_u64()  # decouple the first output from small seeds

    def next_u64(self) -> int:
        self.state = (_MULT * self.state + _INC) & _MASK
        return self.state

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def derive(self, salt: int) -> "Lcg":
        """Independent child stream; deterministic in (seed, salt)."""
        return Lcg(self.state ^ (salt * 0xD1342543DE82EF95 & _MASK))
