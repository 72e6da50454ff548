"""Registry of the range-hashing algorithms exposed by the service and CLI."""

from __future__ import annotations

from .core import FlipHash
from .jumphash import JumpHash

ALGORITHMS = ("fliphash", "jumphash")


def make_hasher(algorithm: str, seed: int = 0, max_retries: int = 64):
    """Instantiate a range hasher by name."""
    if algorithm == "fliphash":
        return FlipHash(seed=seed, max_retries=max_retries)
    if algorithm == "jumphash":
        return JumpHash(seed=seed)
    raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
