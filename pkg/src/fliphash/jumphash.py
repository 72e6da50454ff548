"""Jump consistent hash, the baseline consistent range hasher.

Transcription of the Lamping & Veach routine (arXiv:1406.2294): a 64-bit
linear congruential generator is seeded with the key and its pseudorandom
sequence is followed -- jumped across -- until it exceeds the resource
count, at which point the previous position is the hash value.  Monotone
and regular like FlipHash, but the number of jumps grows logarithmically
with the resource count.
"""

from __future__ import annotations

from .mixing import MASK64

# LCG multiplier from the published routine.
JUMP_LCG_MULTIPLIER = 2862933555777941757

# The routine's internal arithmetic is signed 64-bit; resource counts must
# stay below 2**63.
MAX_JUMP_RANGE = 1 << 63

_TWO31 = float(1 << 31)


def jump_hash(key: int, n: int) -> int:
    """Map ``key`` to an integer in ``[0, n)`` with the published routine."""
    if not 0 <= key <= MASK64:
        raise ValueError("key must be an unsigned 64-bit integer")
    if not 1 <= n <= MAX_JUMP_RANGE:
        raise ValueError(f"resource count must be in [1, 2**63], got {n}")
    b, j = -1, 0
    while j < n:
        b = j
        key = (key * JUMP_LCG_MULTIPLIER + 1) & MASK64
        j = int(float(b + 1) * (_TWO31 / float((key >> 33) + 1)))
    return b


class JumpHash:
    """Stateless, optionally seeded wrapper around :func:`jump_hash`.

    The routine is unseeded in its original form; the seed is folded into
    the key by XOR before evaluation, mirroring how FlipHash is seeded, so
    seeded comparisons between the two stay apples-to-apples.  Note that
    this diversifies the key stream but does not make differently seeded
    instances statistically independent: a fixed XOR difference survives
    into the LCG state bits that drive the first jump.
    """

    __slots__ = ("seed",)

    def __init__(self, seed: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed

    def with_seed(self, seed: int) -> "JumpHash":
        return JumpHash(seed=seed)

    def hash(self, key: int, n: int) -> int:
        """Map ``key`` to an integer in ``[0, n)``."""
        if not 0 <= key <= MASK64:
            raise ValueError("key must be an unsigned 64-bit integer")
        return jump_hash(key ^ self.seed, n)

    def hash_many(self, keys, n: int):
        """Vectorized :meth:`hash` over a numpy array of uint64 keys."""
        from . import bulk

        return bulk.jumphash_many(keys, n, seed=self.seed)
