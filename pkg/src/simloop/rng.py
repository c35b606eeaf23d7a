"""SplitMix64: the pinned deterministic generator for synthetic data.

Chosen over the interpreter's default RNG because the algorithm is a
dozen lines of 64-bit integer arithmetic that any language reproduces
bit-for-bit, so generated test corpora are portable. Constants are the
standard SplitMix64 ones (Steele, Lea & Flood 2014).
"""
from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit generator; state advances by the golden-gamma increment."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi]; plain modulo reduction.

        Modulo bias is negligible for the small ranges used here and keeps
        the draw sequence trivial to reproduce elsewhere.
        """
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, seq):
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[self.randint(0, len(seq) - 1)]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending index order."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]
