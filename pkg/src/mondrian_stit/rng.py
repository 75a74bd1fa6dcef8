"""Seeding helpers.

Every tessellation is driven by one 64-bit seed.  The seed is pushed through
SplitMix64 and used as the key of a Philox4x64 counter-based generator, so
neighbouring seeds give unrelated streams.  Replicate ``i`` of a batch with
master seed ``m`` uses ``derive_seed(m, i) = splitmix64((m + i) mod 2**64)``.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# Offset mixed into the master seed for bootstrap resampling streams; keeps
# them disjoint from the replicate streams derive_seed(m, 0..n-1).
BOOTSTRAP_STREAM = 0x9E3779B97F4A7C15
# Mixed into a replicate seed for the skeleton jitter of that replicate.
SKELETON_STREAM = 0xD1B54A32D192ED03


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def derive_seed(master: int, index: int) -> int:
    """Seed of replicate ``index`` under ``master``."""
    return splitmix64((check_seed(master) + int(index)) & MASK64)


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=splitmix64(check_seed(seed))))


class UniformStream:
    """Buffered U(0,1) draws from a generator.

    Consumption order is the only thing that matters for reproducibility, so
    refilling in fixed-size blocks keeps results independent of how many
    numbers a caller happens to need.
    """

    __slots__ = ("_gen", "_buf", "_pos", "_block")

    def __init__(self, gen: np.random.Generator, block: int = 512):
        self._gen = gen
        self._block = block
        self._buf = gen.random(block).tolist()
        self._pos = 0

    def next(self) -> float:
        """Return a float in [0, 1)."""
        if self._pos == self._block:
            self._buf = self._gen.random(self._block).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def next_open_closed(self) -> float:
        """Return a float in (0, 1]; safe to take the log of."""
        return 1.0 - self.next()
