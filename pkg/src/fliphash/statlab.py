"""Statistical verification of range hashers.

Uniformity (chi-squared and L2 against the uniform distribution),
monotonicity scanning with exact illegal-move counting, remap-fraction
measurement, and chi-squared independence checks across seeds and across
range sizes.  All report computations are single-shot pure functions;
histogram construction vectorizes over the key array and merged histograms
combine associatively and commutatively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

from .bulk import as_key_array

# Chi-squared expected cell counts below this make the test unreliable; such
# tables are flagged as underpowered rather than passed.
MIN_EXPECTED_CELL_COUNT = 5.0

# Two-sided acceptance band for chi-squared p-values at significance 1e-3:
# wide enough to keep honest runs from flaking, tight enough to catch gross
# non-uniformity in either direction.
ACCEPTANCE_P_BOUNDS = (0.001, 0.999)

# Hard cap on materialized count arrays (histograms and contingency tables).
_MAX_CELLS = 1 << 26


@dataclass(eq=False)
class Histogram:
    """Counts of hash outputs per resource index."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 1 or self.counts.size < 1:
            raise ValueError("counts must be a non-empty 1-d array")
        if self.counts.min() < 0:
            raise ValueError("counts must be non-negative")

    @property
    def n(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "Histogram") -> "Histogram":
        """Combine counts from two shards of the same key stream."""
        if other.n != self.n:
            raise ValueError("histograms cover different resource counts")
        return Histogram(self.counts + other.counts)


@dataclass(frozen=True)
class UniformityReport:
    """Chi-squared and L2 comparison of observed counts against uniform."""

    chi_squared: float
    degrees_of_freedom: int
    p_value: float
    l2_distance: float
    underpowered: bool = False

    def to_dict(self) -> dict:
        return {
            "chi_squared": self.chi_squared,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
            "l2_distance": self.l2_distance,
            "underpowered": self.underpowered,
        }

    def lines(self) -> list[str]:
        return [f"{name}={value}" for name, value in self.to_dict().items()]


@dataclass(frozen=True)
class RemapReport:
    """What moved when the resource count changed from n_before to n_after.

    ``illegal_moves`` counts keys remapped to a value below
    min(n_before, n_after) that differs from their previous value; it is
    exactly zero for any monotone hasher.
    """

    n_before: int
    n_after: int
    moved_fraction: float
    illegal_moves: int

    def to_dict(self) -> dict:
        return {
            "n_before": self.n_before,
            "n_after": self.n_after,
            "moved_fraction": self.moved_fraction,
            "illegal_moves": self.illegal_moves,
        }

    def lines(self) -> list[str]:
        return [f"{name}={value}" for name, value in self.to_dict().items()]


def hash_array(hasher, keys, n: int) -> np.ndarray:
    """Hash a key array under ``hasher``, vectorized when supported.

    ``hasher`` may expose ``hash_many(keys, n)`` (FlipHash, JumpHash), a
    scalar ``hash(key, n)`` method, or be a plain ``(key, n)`` callable.
    """
    keys = as_key_array(keys)
    many = getattr(hasher, "hash_many", None)
    if many is not None:
        return np.asarray(many(keys, n), dtype=np.uint64)
    single = getattr(hasher, "hash", hasher)
    return np.fromiter((single(int(k), n) for k in keys), dtype=np.uint64,
                       count=keys.size)


def build_histogram(hashfn, n: int, keys) -> Histogram:
    """Count hash outputs per resource index over a key sequence.

    ``hashfn`` maps a key to a bucket in [0, n); it may be vectorized (uint64
    array in, bucket array out) or scalar.  A hash output outside [0, n) is a
    contract violation of the hash function and raises.
    """
    if n < 1:
        raise ValueError(f"resource count must be >= 1, got {n}")
    if n > _MAX_CELLS:
        raise ValueError(f"histogram over {n} resources is too large to materialize")
    keys = as_key_array(keys)
    if keys.size == 0:
        raise ValueError("keys must be non-empty")

    buckets = None
    try:
        out = np.asarray(hashfn(keys))
        if out.shape == keys.shape and out.dtype.kind in "iu":
            buckets = out
    except (TypeError, ValueError, AttributeError):
        buckets = None
    if buckets is None:  # scalar fallback
        buckets = np.fromiter((hashfn(int(k)) for k in keys), dtype=np.int64,
                              count=keys.size)

    low, high = int(buckets.min()), int(buckets.max())
    if low < 0 or high >= n:
        raise ValueError(
            f"hash output outside [0, {n}): saw values in [{low}, {high}]"
        )
    counts = np.bincount(buckets.astype(np.int64), minlength=n)
    return Histogram(counts)


def uniformity(histogram: Histogram) -> UniformityReport:
    """Chi-squared goodness of fit of a histogram against the uniform law."""
    total = histogram.total
    if total <= 0:
        raise ValueError("histogram is empty")
    counts = histogram.counts.astype(np.float64)
    n = histogram.n
    l2 = float(np.sqrt(np.sum((counts / total - 1.0 / n) ** 2)))
    if n == 1:
        return UniformityReport(chi_squared=0.0, degrees_of_freedom=0,
                                p_value=1.0, l2_distance=l2)
    expected = total / n
    chi_squared = float(np.sum((counts - expected) ** 2) / expected)
    dof = n - 1
    p_value = float(_chi2.sf(chi_squared, dof))
    underpowered = expected < MIN_EXPECTED_CELL_COUNT
    return UniformityReport(chi_squared=chi_squared, degrees_of_freedom=dof,
                            p_value=p_value, l2_distance=l2,
                            underpowered=underpowered)


def remap_step(hasher, n_before: int, n_after: int, keys) -> RemapReport:
    """Measure key movement when the resource count changes."""
    if not 1 <= n_before < n_after:
        raise ValueError("need 1 <= n_before < n_after")
    keys = as_key_array(keys)
    if keys.size == 0:
        raise ValueError("keys must be non-empty")
    before = hash_array(hasher, keys, n_before)
    after = hash_array(hasher, keys, n_after)
    moved = before != after
    illegal = int(np.count_nonzero(moved & (after < np.uint64(n_before))))
    return RemapReport(n_before=n_before, n_after=n_after,
                       moved_fraction=float(moved.mean()),
                       illegal_moves=illegal)


def scan_monotonicity(hasher, n_min: int, n_max: int, keys) -> list[RemapReport]:
    """One RemapReport per step n -> n+1 for n in [n_min, n_max).

    Monotonicity violations are reported via ``illegal_moves``, not raised.
    """
    if not 1 <= n_min < n_max:
        raise ValueError("need 1 <= n_min < n_max")
    keys = as_key_array(keys)
    if keys.size == 0:
        raise ValueError("keys must be non-empty")
    reports = []
    prev = hash_array(hasher, keys, n_min)
    for n in range(n_min, n_max):
        cur = hash_array(hasher, keys, n + 1)
        moved = cur != prev
        illegal = int(np.count_nonzero(moved & (cur < np.uint64(n))))
        reports.append(RemapReport(n_before=n, n_after=n + 1,
                                   moved_fraction=float(moved.mean()),
                                   illegal_moves=illegal))
        prev = cur
    return reports


def _contingency_report(table: np.ndarray,
                        min_expected: float = MIN_EXPECTED_CELL_COUNT) -> UniformityReport:
    """Pearson chi-squared independence test on a two-way table."""
    total = table.sum()
    if total <= 0:
        raise ValueError("contingency table is empty")
    l2 = float(np.sqrt(np.sum((table / total - 1.0 / table.size) ** 2)))
    # All-zero rows and columns carry no information about independence.
    trimmed = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    rows = trimmed.sum(axis=1, dtype=np.float64)
    cols = trimmed.sum(axis=0, dtype=np.float64)
    dof = (trimmed.shape[0] - 1) * (trimmed.shape[1] - 1)
    if dof == 0:
        return UniformityReport(chi_squared=0.0, degrees_of_freedom=0,
                                p_value=1.0, l2_distance=l2, underpowered=True)
    expected = np.outer(rows, cols) / total
    chi_squared = float(np.sum((trimmed - expected) ** 2 / expected))
    p_value = float(_chi2.sf(chi_squared, dof))
    return UniformityReport(chi_squared=chi_squared, degrees_of_freedom=dof,
                            p_value=p_value, l2_distance=l2,
                            underpowered=bool(expected.min() < min_expected))


def independence_check(hasher, axis: str, keys, *, n: int | None = None,
                       other_seed: int | None = None,
                       exponent_low: int | None = None,
                       exponent_high: int | None = None,
                       min_expected: float = MIN_EXPECTED_CELL_COUNT) -> UniformityReport:
    """Chi-squared independence test on a table of paired hash outcomes.

    axis "seed": tabulate (hash under the hasher's own seed, hash under
    ``other_seed``) over [0, n) x [0, n) for the same keys.  Reseeding the
    hasher should yield an unrelated hash function, so the table should pass
    an independence test; comparing a seed with itself should fail it
    decisively (a useful sanity inversion).

    axis "range": tabulate (value in [0, 2**exponent_low), value in
    [0, 2**exponent_high)) conditioned on the second value landing at or
    above 2**exponent_low.  Below that bound consistency forces the two
    values to be equal, so only remapped keys are informative; conditioned
    on the remap, the pair should look independent.

    A table whose expected cell counts fall below ``min_expected`` is
    flagged ``underpowered`` rather than passed.
    """
    keys = as_key_array(keys)
    if keys.size == 0:
        raise ValueError("keys must be non-empty")
    if axis == "seed":
        if n is None or other_seed is None:
            raise ValueError("seed axis needs n and other_seed")
        if n * n > _MAX_CELLS:
            raise ValueError(f"contingency table over {n}x{n} cells is too large")
        first = hash_array(hasher, keys, n).astype(np.int64)
        second = hash_array(hasher.with_seed(other_seed), keys, n).astype(np.int64)
        table = np.bincount(first * n + second, minlength=n * n).reshape(n, n)
    elif axis == "range":
        if exponent_low is None or exponent_high is None:
            raise ValueError("range axis needs exponent_low and exponent_high")
        if not 0 <= exponent_low < exponent_high <= 64:
            raise ValueError("need 0 <= exponent_low < exponent_high <= 64")
        n_low, n_high = 1 << exponent_low, 1 << exponent_high
        cols = n_high - n_low
        if n_low * cols > _MAX_CELLS:
            raise ValueError("contingency table is too large to materialize")
        first = hash_array(hasher, keys, n_low)
        second = hash_array(hasher, keys, n_high)
        remapped = second >= np.uint64(n_low)
        old = first[remapped].astype(np.int64)
        new = (second[remapped] - np.uint64(n_low)).astype(np.int64)
        if old.size == 0:
            raise ValueError("no keys were remapped; increase the key count")
        table = np.bincount(old * cols + new, minlength=n_low * cols).reshape(n_low, cols)
    else:
        raise ValueError(f"unknown axis {axis!r}, expected 'seed' or 'range'")
    return _contingency_report(table, min_expected)


def remap_spread(hasher, exponent_low: int, exponent_high: int, keys) -> UniformityReport:
    """Uniformity of remapped keys over the newly added range.

    When the range grows from 2**exponent_low to 2**exponent_high, the keys
    that move should spread evenly over [2**exponent_low, 2**exponent_high):
    an upscale then spreads hotspots across all new resources instead of
    shifting them onto a single one.
    """
    if not 0 <= exponent_low < exponent_high <= 64:
        raise ValueError("need 0 <= exponent_low < exponent_high <= 64")
    n_low, n_high = 1 << exponent_low, 1 << exponent_high
    if n_high - n_low > _MAX_CELLS:
        raise ValueError("spread histogram is too large to materialize")
    keys = as_key_array(keys)
    values = hash_array(hasher, keys, n_high)
    remapped = values[values >= np.uint64(n_low)] - np.uint64(n_low)
    if remapped.size == 0:
        raise ValueError("no keys were remapped; increase the key count")
    counts = np.bincount(remapped.astype(np.int64), minlength=n_high - n_low)
    return uniformity(Histogram(counts))
