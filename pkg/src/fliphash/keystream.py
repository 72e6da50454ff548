"""Deterministic 64-bit key streams for statistical runs and benchmarks.

Counter-mode SplitMix64: the i-th key is a Stafford mix13 finalization of
``stream_seed + (i + 1) * golden``.  Its multiplier and shift constants
intentionally differ from the production mixer's so that the generated key
stream cannot be correlated with the hash functions under test.
"""

from __future__ import annotations

import numpy as np

from .mixing import MASK64

STREAM_INCREMENT = 0x9E3779B97F4A7C15
STREAM_MULT_1 = 0xBF58476D1CE4E5B9
STREAM_MULT_2 = 0x94D049BB133111EB


def key_at(index: int, stream_seed: int = 0) -> int:
    """The ``index``-th key of the stream, as a plain int."""
    z = (stream_seed + (index + 1) * STREAM_INCREMENT) & MASK64
    z ^= z >> 30
    z = (z * STREAM_MULT_1) & MASK64
    z ^= z >> 27
    z = (z * STREAM_MULT_2) & MASK64
    return z ^ (z >> 31)


def key_stream(count: int, stream_seed: int = 0, start: int = 0) -> np.ndarray:
    """``count`` consecutive stream keys starting at ``start``, as uint64."""
    if count < 0:
        raise ValueError("count must be non-negative")
    base = np.uint64((stream_seed + (start + 1) * STREAM_INCREMENT) & MASK64)
    z = base + np.arange(count, dtype=np.uint64) * np.uint64(STREAM_INCREMENT)
    z ^= z >> np.uint64(30)
    z *= np.uint64(STREAM_MULT_1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(STREAM_MULT_2)
    return z ^ (z >> np.uint64(31))
