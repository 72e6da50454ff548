"""Constant-time consistent range hashing of 64-bit keys.

``FlipHash`` maps a key to an integer in ``[0, n)`` for any resource count
``1 <= n < 2**64``.  It is monotone: growing the range from ``n`` to ``n+1``
either leaves a key where it was or moves it onto the new top index ``n``,
never between indices that exist on both sides.  It is also regular: keys
spread evenly over the range.  Evaluation costs a constant number of hash
evaluations on average, independent of ``n``.

The evaluation works in two layers.  For a power-of-two range ``2**r`` the
key is hashed once and masked to the low ``r`` bits; the bits strictly below
the leading one bit of that draw are then XOR-flipped with an independent
second hash, which preserves the leading bit (hence monotonicity) while
re-randomizing the rest (which spreads remapped keys across the whole new
half-range when the range doubles).  For general ``n`` the power-of-two
result for the next ``2**r >= n`` is used directly when it lands below
``n``; otherwise a bounded retry loop draws fresh hashes until one lands in
``[0, n)``, falling back to the ``2**(r-1)`` result whenever a draw lands in
the lower half (which keeps the function consistent with smaller ranges).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .mixing import (
    HashFamily,
    MASK64,
    MAX_RETRY_INDEX,
    MIX_MULT_1,
    MIX_MULT_2,
    SEED_EXPANDER,
    expand_seed,
    family_seed,
    mix64,
)

MAX_RANGE = MASK64  # largest supported resource count: 2**64 - 1

# Low-bit masks indexed by width; _MASKS[64] is the full 64-bit mask.
_MASKS = tuple((1 << r) - 1 for r in range(65))

# Return paths of the general-range evaluation.
PATH_DIRECT = "A"  # power-of-two candidate already lies in [0, n)
PATH_RETRY_LOWER = "B"  # a retry fell below 2**(r-1): reuse the half-range value
PATH_RETRY_HIT = "C"  # a retry fell in [2**(r-1), n)
PATH_EXHAUSTED = "D"  # retry budget spent: fall back to the half-range value


@dataclass(frozen=True)
class Pow2Trace:
    """Intermediates of one power-of-two evaluation."""

    exponent: int  # range is [0, 2**exponent)
    masked: int  # first draw, masked to the low `exponent` bits
    top_bit: int  # position of the leading one bit of `masked` (0 when masked == 0)
    flip: int  # second draw, masked to the bits strictly below `top_bit`
    value: int  # masked ^ flip


@dataclass(frozen=True)
class EvalTrace:
    """Full record of one general-range evaluation.

    ``retries`` holds the masked retry draws in order; ``fallback`` is the
    power-of-two evaluation at ``range_exponent - 1`` and is only present on
    paths B and D.
    """

    key: int
    n: int
    range_exponent: int  # smallest r with n <= 2**r
    pow2_value: int  # candidate drawn from [0, 2**range_exponent)
    retries: tuple[int, ...]
    path: str
    value: int
    pow2: Pow2Trace
    fallback: Optional[Pow2Trace] = None


def ceil_log2(n: int) -> int:
    """Smallest r with n <= 2**r, for n >= 1."""
    return (n - 1).bit_length()


class FlipHash:
    """Consistent range hasher over 64-bit keys.

    Instances are immutable after construction and safe for unrestricted
    concurrent use.

    Parameters:
        seed: 64-bit seed folded into every hash-family seed.  Instances
            meant to hash independently should use seeds that differ above
            bit 32; seeds differing only in the low 32 bits can share
            family members (see :func:`fliphash.mixing.family_seed`).
        max_retries: bound on the retry loop for non-power-of-two ranges
            (1 <= max_retries < 2**16).  The default of 64 makes the
            probability of ever exhausting the loop negligible.
        family: optional hash family ``(key, family_seed) -> 64-bit value``
            replacing the built-in mixer; used to inject scripted values in
            tests.  The built-in mixer takes an optimized path.
    """

    __slots__ = ("seed", "max_retries", "_family", "_g_by_bit")

    def __init__(self, seed: int = 0, max_retries: int = 64,
                 family: Optional[HashFamily] = None):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 1 <= max_retries <= MAX_RETRY_INDEX:
            raise ValueError(
                f"max_retries must be in [1, {MAX_RETRY_INDEX}], got {max_retries}"
            )
        self.seed = seed
        self.max_retries = max_retries
        self._family = family
        if family is None:
            # Pre-expanded family seeds for (bit, retry=0), the only seeds
            # needed outside the retry loop.
            self._g_by_bit = tuple(
                expand_seed(family_seed(bit, 0, seed)) for bit in range(64)
            )
        else:
            self._g_by_bit = None

    def with_seed(self, seed: int) -> "FlipHash":
        """Same configuration under a different seed."""
        return FlipHash(seed=seed, max_retries=self.max_retries, family=self._family)

    # -- scalar evaluation -------------------------------------------------

    def hash(self, key: int, n: int, *, _masks=_MASKS, _m1=MIX_MULT_1,
             _m2=MIX_MULT_2, _mask64=MASK64, _expander=SEED_EXPANDER) -> int:
        """Map ``key`` to an integer in ``[0, n)``.

        The keyword-only parameters are internal constant bindings; per-call
        costs matter here, so the built-in-mixer path is written inline.
        """
        if not 0 <= key <= _mask64:
            raise ValueError("key must be an unsigned 64-bit integer")
        if not 1 <= n <= MAX_RANGE:
            raise ValueError(f"resource count must be in [1, 2**64 - 1], got {n}")
        if self._family is not None:
            return self._hash_generic(key, n)

        g_by_bit = self._g_by_bit
        r = (n - 1).bit_length()

        # Power-of-two candidate for [0, 2**r): first draw, then flip the
        # bits below its leading one bit with an independent second draw.
        g = g_by_bit[0]
        h = key ^ g
        h ^= h >> 27
        h = (h * _m1 + g) & _mask64
        h ^= h >> 33
        h = (h * _m2) & _mask64
        h ^= h >> 27
        masked = h & _masks[r]
        if masked:
            top = masked.bit_length() - 1
            g = g_by_bit[top]
            h = key ^ g
            h ^= h >> 27
            h = (h * _m1 + g) & _mask64
            h ^= h >> 33
            h = (h * _m2) & _mask64
            h ^= h >> 27
            candidate = masked ^ (h & _masks[top])
        else:
            candidate = 0
        if candidate < n:
            return candidate

        # candidate >= n implies n < 2**r, hence r >= 1: retry with fresh
        # draws until one lands in [0, n), at most max_retries times.
        assert r >= 1, "retry loop reached with a full power-of-two range"
        half = 1 << (r - 1)
        base = (r - 1) ^ self.seed
        mask_r = _masks[r]
        for i in range(1, self.max_retries + 1):
            g = ((base ^ (i << 16)) * _expander) & _mask64
            h = key ^ g
            h ^= h >> 27
            h = (h * _m1 + g) & _mask64
            h ^= h >> 33
            h = (h * _m2) & _mask64
            h ^= h >> 27
            retry = h & mask_r
            if retry < half:
                break
            if retry < n:
                return retry

        # Lower-half retry or exhausted budget: consistent with the
        # half-range evaluation.
        g = g_by_bit[0]
        h = key ^ g
        h ^= h >> 27
        h = (h * _m1 + g) & _mask64
        h ^= h >> 33
        h = (h * _m2) & _mask64
        h ^= h >> 27
        masked = h & _masks[r - 1]
        if not masked:
            return 0
        top = masked.bit_length() - 1
        g = g_by_bit[top]
        h = key ^ g
        h ^= h >> 27
        h = (h * _m1 + g) & _mask64
        h ^= h >> 33
        h = (h * _m2) & _mask64
        h ^= h >> 27
        return masked ^ (h & _masks[top])

    def hash_pow2(self, key: int, exponent: int) -> int:
        """Map ``key`` to an integer in ``[0, 2**exponent)``, 0 <= exponent <= 64."""
        if not 0 <= key <= MASK64:
            raise ValueError("key must be an unsigned 64-bit integer")
        if not 0 <= exponent <= 64:
            raise ValueError(f"exponent must be in [0, 64], got {exponent}")
        return self._pow2(key, exponent)

    # -- readable reference path (also used with injected families) ---------

    def _evaluate_family(self, key: int, bit: int, retry: int) -> int:
        family = self._family if self._family is not None else mix64
        return family(key, family_seed(bit, retry, self.seed))

    def _pow2(self, key: int, exponent: int) -> int:
        masked = self._evaluate_family(key, 0, 0) & _MASKS[exponent]
        top = masked.bit_length() - 1 if masked else 0
        flip = self._evaluate_family(key, top, 0) & _MASKS[top]
        return masked ^ flip

    def _hash_generic(self, key: int, n: int) -> int:
        r = ceil_log2(n)
        candidate = self._pow2(key, r)
        if candidate < n:
            return candidate
        half = 1 << (r - 1)
        for i in range(1, self.max_retries + 1):
            retry = self._evaluate_family(key, r - 1, i) & _MASKS[r]
            if retry < half:
                return self._pow2(key, r - 1)
            if retry < n:
                return retry
        return self._pow2(key, r - 1)

    # -- traced evaluation ---------------------------------------------------

    def _pow2_traced(self, key: int, exponent: int) -> Pow2Trace:
        masked = self._evaluate_family(key, 0, 0) & _MASKS[exponent]
        top = masked.bit_length() - 1 if masked else 0
        flip = self._evaluate_family(key, top, 0) & _MASKS[top]
        return Pow2Trace(exponent=exponent, masked=masked, top_bit=top,
                         flip=flip, value=masked ^ flip)

    def trace(self, key: int, n: int) -> EvalTrace:
        """Evaluate like :meth:`hash` while recording every intermediate.

        The returned value is always identical to ``hash(key, n)``.
        """
        if not 0 <= key <= MASK64:
            raise ValueError("key must be an unsigned 64-bit integer")
        if not 1 <= n <= MAX_RANGE:
            raise ValueError(f"resource count must be in [1, 2**64 - 1], got {n}")
        r = ceil_log2(n)
        pow2 = self._pow2_traced(key, r)
        if pow2.value < n:
            return EvalTrace(key=key, n=n, range_exponent=r, pow2_value=pow2.value,
                             retries=(), path=PATH_DIRECT, value=pow2.value,
                             pow2=pow2)
        half = 1 << (r - 1)
        retries = []
        for i in range(1, self.max_retries + 1):
            retry = self._evaluate_family(key, r - 1, i) & _MASKS[r]
            retries.append(retry)
            if retry < half:
                fallback = self._pow2_traced(key, r - 1)
                return EvalTrace(key=key, n=n, range_exponent=r,
                                 pow2_value=pow2.value, retries=tuple(retries),
                                 path=PATH_RETRY_LOWER, value=fallback.value,
                                 pow2=pow2, fallback=fallback)
            if retry < n:
                return EvalTrace(key=key, n=n, range_exponent=r,
                                 pow2_value=pow2.value, retries=tuple(retries),
                                 path=PATH_RETRY_HIT, value=retry, pow2=pow2)
        fallback = self._pow2_traced(key, r - 1)
        return EvalTrace(key=key, n=n, range_exponent=r, pow2_value=pow2.value,
                         retries=tuple(retries), path=PATH_EXHAUSTED,
                         value=fallback.value, pow2=pow2, fallback=fallback)

    # -- bulk evaluation -----------------------------------------------------

    def hash_many(self, keys, n: int):
        """Vectorized :meth:`hash` over a numpy array of uint64 keys."""
        from . import bulk

        if self._family is not None:
            return bulk.hash_with(lambda k: self._hash_generic(k, n), keys)
        return bulk.fliphash_many(keys, n, seed=self.seed,
                                  max_retries=self.max_retries)

    def hash_pow2_many(self, keys, exponent: int):
        """Vectorized :meth:`hash_pow2` over a numpy array of uint64 keys."""
        from . import bulk

        if self._family is not None:
            return bulk.hash_with(lambda k: self._pow2(k, exponent), keys)
        return bulk.fliphash_pow2_many(keys, exponent, seed=self.seed)
