"""Vectorized evaluation of the range hashers over numpy key arrays.

These functions compute exactly the same values as the scalar methods on
``FlipHash`` and ``JumpHash`` (the test suite cross-checks them) but
evaluate whole uint64 arrays at once, which is what makes the statistical
suites run in seconds instead of hours.
"""

from __future__ import annotations

import numpy as np

from .jumphash import JUMP_LCG_MULTIPLIER, MAX_JUMP_RANGE, jump_hash
from .mixing import (
    MASK64,
    MAX_RETRY_INDEX,
    MIX_MULT_1,
    MIX_MULT_2,
    MIX_SHIFT_1,
    MIX_SHIFT_2,
    MIX_SHIFT_3,
    SEED_EXPANDER,
    family_seed,
)

_U64 = np.uint64
_MULT1 = _U64(MIX_MULT_1)
_MULT2 = _U64(MIX_MULT_2)
_EXPANDER = _U64(SEED_EXPANDER)
_SHIFT1 = _U64(MIX_SHIFT_1)
_SHIFT2 = _U64(MIX_SHIFT_2)
_SHIFT3 = _U64(MIX_SHIFT_3)
_ONE = _U64(1)
_TWO31_F = np.float64(1 << 31)

# Beyond 2**53 the float64 comparison against n in the vectorized jump loop
# is no longer exact; fall back to the scalar routine there.
_JUMP_BULK_LIMIT = 1 << 53


def as_key_array(keys) -> np.ndarray:
    """Coerce a key sequence to a uint64 array, rejecting out-of-range values."""
    if not isinstance(keys, np.ndarray):
        # Plain sequences must not round-trip through numpy's default
        # inference, which promotes large Python ints to float64.
        try:
            return np.asarray(keys, dtype=np.uint64)
        except OverflowError as exc:
            raise ValueError("keys must be unsigned 64-bit integers") from exc
    arr = keys
    if arr.size == 0:
        return arr.astype(np.uint64)
    if arr.dtype == np.uint64:
        return arr
    if arr.dtype.kind == "u":
        return arr.astype(np.uint64)
    if arr.dtype.kind == "i":
        if int(arr.min()) < 0:
            raise ValueError("keys must be unsigned 64-bit integers")
        return arr.astype(np.uint64)
    if arr.dtype == object:
        out = np.empty(arr.shape, dtype=np.uint64)
        for i, key in enumerate(arr.flat):
            key = int(key)
            if not 0 <= key <= MASK64:
                raise ValueError("keys must be unsigned 64-bit integers")
            out.flat[i] = key
        return out
    raise TypeError(f"cannot interpret dtype {arr.dtype} as 64-bit keys")


def _mix_expanded(keys: np.ndarray, g) -> np.ndarray:
    # Same rounds as mixing.mix64, with the seed expansion already done.
    h = keys ^ g
    h = h ^ (h >> _SHIFT1)
    h = h * _MULT1 + g
    h = h ^ (h >> _SHIFT2)
    h = h * _MULT2
    return h ^ (h >> _SHIFT3)


def mix_many(keys, fseed: int) -> np.ndarray:
    """Vectorized ``mixing.mix64`` with a shared family seed."""
    keys = as_key_array(keys)
    g = _U64((fseed * SEED_EXPANDER) & MASK64)
    return _mix_expanded(keys, g)


def bit_lengths(values: np.ndarray) -> np.ndarray:
    """Per-element ``int.bit_length`` for a uint64 array."""
    v = values.copy()
    for shift in (1, 2, 4, 8, 16, 32):
        v |= v >> _U64(shift)
    return np.bitwise_count(v).astype(np.uint64)


def _low_mask(width: int) -> np.uint64:
    return _U64((1 << width) - 1)


def fliphash_pow2_many(keys, exponent: int, seed: int = 0) -> np.ndarray:
    """Vectorized ``FlipHash.hash_pow2`` with the built-in mixer."""
    if not 0 <= exponent <= 64:
        raise ValueError(f"exponent must be in [0, 64], got {exponent}")
    keys = as_key_array(keys)
    first = mix_many(keys, family_seed(0, 0, seed))
    masked = first & _low_mask(exponent)
    lengths = bit_lengths(masked)
    # Leading-bit position; the branch value for masked == 0 wraps but is
    # discarded by the where().
    top = np.where(masked > 0, lengths - _ONE, _U64(0)).astype(np.uint64)
    g = (top ^ _U64(seed)) * _EXPANDER
    flip = _mix_expanded(keys, g) & ((_ONE << top) - _ONE)
    return masked ^ flip


def fliphash_many(keys, n: int, seed: int = 0, max_retries: int = 64) -> np.ndarray:
    """Vectorized ``FlipHash.hash`` with the built-in mixer."""
    if not 1 <= n <= MASK64:
        raise ValueError(f"resource count must be in [1, 2**64 - 1], got {n}")
    if not 1 <= max_retries <= MAX_RETRY_INDEX:
        raise ValueError("max_retries must be in [1, 2**16 - 1]")
    keys = as_key_array(keys)
    r = (n - 1).bit_length()
    out = fliphash_pow2_many(keys, r, seed=seed)
    if n == (1 << r):
        return out

    pending = np.flatnonzero(out >= _U64(n))
    if pending.size == 0:
        return out
    pending_keys = keys[pending]
    half = _U64(1 << (r - 1))
    bound = _U64(n)
    mask_r = _low_mask(r)

    values = np.zeros(pending.size, dtype=np.uint64)
    settled = np.zeros(pending.size, dtype=bool)
    to_lower = np.zeros(pending.size, dtype=bool)
    active = np.arange(pending.size)
    for i in range(1, max_retries + 1):
        retry = mix_many(pending_keys[active], family_seed(r - 1, i, seed)) & mask_r
        lower = retry < half
        hit = ~lower & (retry < bound)
        if lower.any():
            idx = active[lower]
            to_lower[idx] = True
            settled[idx] = True
        if hit.any():
            idx = active[hit]
            values[idx] = retry[hit]
            settled[idx] = True
        active = active[~(lower | hit)]
        if active.size == 0:
            break
    to_lower[~settled] = True  # retry budget exhausted
    if to_lower.any():
        values[to_lower] = fliphash_pow2_many(pending_keys[to_lower], r - 1, seed=seed)
    out[pending] = values
    return out


def jumphash_many(keys, n: int, seed: int = 0) -> np.ndarray:
    """Vectorized ``JumpHash.hash``."""
    if not 1 <= n <= MAX_JUMP_RANGE:
        raise ValueError(f"resource count must be in [1, 2**63], got {n}")
    keys = as_key_array(keys)
    if n > _JUMP_BULK_LIMIT:
        return hash_with(lambda k: jump_hash(k ^ seed, n), keys)

    b = np.zeros(keys.shape, dtype=np.uint64)
    n_f = np.float64(n)
    mult = _U64(JUMP_LCG_MULTIPLIER)
    active = np.arange(keys.size)
    state_a = (keys ^ _U64(seed)).copy()
    j_a = np.zeros(keys.size, dtype=np.float64)
    while active.size:
        b_a = j_a.astype(np.uint64)
        b[active] = b_a
        state_a = state_a * mult + _ONE
        # Same float64 evaluation order as the scalar routine: divide, then
        # multiply, then truncate.
        ratio = _TWO31_F / ((state_a >> _U64(33)) + _ONE).astype(np.float64)
        j_a = np.floor((b_a + _ONE).astype(np.float64) * ratio)
        still = j_a < n_f
        active = active[still]
        state_a = state_a[still]
        j_a = j_a[still]
    return b


def hash_with(scalar_fn, keys) -> np.ndarray:
    """Evaluate a scalar ``key -> value`` function over a key array."""
    keys = as_key_array(keys)
    return np.fromiter((scalar_fn(int(k)) for k in keys), dtype=np.uint64,
                       count=keys.size)
