"""Keyed 64-bit hash family used by the range hashers.

The family is indexed by small (bit, retry) pairs.  ``family_seed`` packs a
pair into a distinct 64-bit seed, and ``mix64`` evaluates the family member
selected by that seed on a 64-bit key.  The mixer is a multiply/xorshift
finalizer: the packed seed is first spread over all 64 bits with a
golden-ratio multiply, XORed into the key before the first round, and added
back in between rounds.

Everything here is pure and stateless; values can be shared freely across
threads.
"""

from __future__ import annotations

from typing import Callable, Mapping

MASK64 = (1 << 64) - 1

# Retry indices must stay below 2**16 so that bit + (retry << 16) never
# collides across distinct (bit, retry) pairs.
MAX_RETRY_INDEX = (1 << 16) - 1

# Multiplier used to spread a packed family seed over all 64 bits:
# 2**64 / phi, the usual golden-ratio constant.
SEED_EXPANDER = 0x9E3779B97F4A7C15

# Round multipliers and shifts from Pelle Evensen's "moremur" finalizer,
# an avalanche-optimized strengthening of the MurmurHash3/SplitMix64 mixers.
MIX_MULT_1 = 0x3C79AC492BA7B653
MIX_MULT_2 = 0x1C69B3F74AC4AE35
MIX_SHIFT_1 = 27
MIX_SHIFT_2 = 33
MIX_SHIFT_3 = 27

# A hash family is any deterministic (key, family seed) -> 64-bit mapping.
HashFamily = Callable[[int, int], int]


def family_seed(bit: int, retry: int, seed: int = 0) -> int:
    """Pack a (bit, retry) pair into a 64-bit family seed.

    The pair is encoded as ``bit + retry * 2**16`` and the user seed is
    folded in with XOR, so for a fixed seed distinct pairs always map to
    distinct family seeds.

    Packed pairs occupy the low 32 bits, which means two user seeds whose
    XOR also sits below 2**32 can map *different* pairs to the *same*
    family seed and thereby share hash values across seeded instances.
    Give independent instances seeds that differ above bit 32.

    Raises ValueError when an argument is outside its allowed range; the
    packing would silently alias otherwise.
    """
    if not 0 <= bit <= 63:
        raise ValueError(f"bit must be in [0, 63], got {bit}")
    if not 0 <= retry <= MAX_RETRY_INDEX:
        raise ValueError(f"retry must be in [0, {MAX_RETRY_INDEX}], got {retry}")
    if not 0 <= seed <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return (bit + (retry << 16)) ^ seed


def expand_seed(fseed: int) -> int:
    """Spread a packed family seed over all 64 bits."""
    return (fseed * SEED_EXPANDER) & MASK64


def mix64(key: int, fseed: int) -> int:
    """Hash a 64-bit key under the family member selected by ``fseed``.

    Deterministic and total over 64-bit inputs, with full-width output.
    Flipping any input bit flips about half of the output bits, and members
    with different seeds behave as mutually independent hashes; both
    properties are checked statistically by the test suite rather than
    assumed.
    """
    g = (fseed * SEED_EXPANDER) & MASK64
    h = key ^ g
    h ^= h >> MIX_SHIFT_1
    h = (h * MIX_MULT_1 + g) & MASK64
    h ^= h >> MIX_SHIFT_2
    h = (h * MIX_MULT_2) & MASK64
    return h ^ (h >> MIX_SHIFT_3)


class TableFamily:
    """Hash family that answers from a fixed (key, family seed) table.

    Useful for tests that need fully scripted hash values.  Looking up a
    pair that is not in the table is a test-setup bug and fails loudly.
    """

    def __init__(self, table: Mapping[tuple[int, int], int]):
        self._table = dict(table)

    def __call__(self, key: int, fseed: int) -> int:
        try:
            return self._table[(key, fseed)]
        except KeyError:
            raise LookupError(
                f"no scripted hash value for key={key}, family seed={fseed}"
            ) from None
