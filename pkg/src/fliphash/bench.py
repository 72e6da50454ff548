"""Wall-time benchmark harness for the range hashers.

Per-call times are in the nanosecond-to-microsecond range, far below what a
single clock read can resolve, so evaluations are timed in batches: each
batch chains evaluations by XOR-feeding the previous output into the next
key (serializing the calls), and the per-key time is the batch time divided
by the batch size.  Means and percentiles are taken across batch means.
Absolute numbers are hardware-bound; the properties worth asserting are
shapes -- flatness across resource counts for FlipHash, logarithmic growth
for JumpHash, and the sawtooth bump just above powers of two.
"""

from __future__ import annotations

import csv
import gc
import io
import json
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass
from statistics import fmean

import numpy as np

from .algorithms import ALGORITHMS, make_hasher
from .keystream import key_stream

CSV_FIELDS = ("algorithm", "n", "mean_ns", "p10_ns", "p90_ns")

# A batch must take at least this many clock ticks to be trustworthy.
_MIN_TICKS_PER_BATCH = 100

_SAWTOOTH_SPAN_LIMIT = 10_000


class ClockResolutionError(RuntimeError):
    """The monotonic clock is too coarse for the configured batch size."""


@dataclass(frozen=True)
class BenchRow:
    """Timing summary for one (algorithm, resource count) point."""

    algorithm: str
    n: int
    mean_ns: float
    p10_ns: float
    p90_ns: float

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "mean_ns": self.mean_ns,
            "p10_ns": self.p10_ns,
            "p90_ns": self.p90_ns,
        }


@dataclass
class BenchConfig:
    """Parameters of a benchmark run.

    ``keys_per_point`` keys are hashed per (algorithm, n) point in batches of
    ``batch_size``; percentiles are taken across the batch means, so
    keys_per_point must be large enough to yield a meaningful number of
    batches.  Each point is swept ``repetitions`` times and the repetition
    with the lowest mean is reported, which filters out noisy-neighbor and
    cold-start interference the way timeit's repeat/min idiom does.
    """

    n_values: tuple[int, ...] = (10, 100, 1_000, 1_000_000, 1_000_000_000)
    keys_per_point: int = 100_000
    warmup_iterations: int = 1_000
    batch_size: int = 1_000
    repetitions: int = 3
    percentiles: tuple[float, float] = (10.0, 90.0)
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        self.n_values = tuple(sorted(int(n) for n in self.n_values))
        if not self.n_values:
            raise ValueError("n_values must be non-empty")
        if self.n_values[0] < 1:
            raise ValueError("resource counts must be >= 1")
        if self.keys_per_point < 1_000:
            raise ValueError("keys_per_point must be >= 1000 for percentile validity")
        if self.batch_size < 100:
            raise ValueError("batch_size must be >= 100 to defeat clock granularity")
        if self.batch_size > self.keys_per_point:
            raise ValueError("batch_size cannot exceed keys_per_point")
        if self.warmup_iterations < 0:
            raise ValueError("warmup_iterations must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        lo, hi = self.percentiles
        if not 0 <= lo <= hi <= 100:
            raise ValueError("percentiles must satisfy 0 <= low <= high <= 100")
        for algorithm in self.algorithms:
            if algorithm not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algorithm!r}")


@contextmanager
def _quiesced():
    """Pin the timing thread to one CPU and pause GC, where possible."""
    previous_affinity = None
    try:
        previous_affinity = os.sched_getaffinity(0)
        os.sched_setaffinity(0, {min(previous_affinity)})
    except (AttributeError, OSError):
        previous_affinity = None
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if gc_was_enabled:
            gc.enable()
        if previous_affinity is not None:
            try:
                os.sched_setaffinity(0, previous_affinity)
            except OSError:
                pass


def _time_point(hash_fn, n: int, keys: list[int], batch_size: int,
                warmup_iterations: int, percentiles: tuple[float, float],
                repetitions: int = 1) -> tuple[float, float, float]:
    """Mean and percentile per-key times for one (hasher, n) point.

    The batch sweep runs ``repetitions`` times; the sweep with the lowest
    mean wins, so transient interference inflates at most the discarded
    sweeps.
    """
    resolution_ns = time.get_clock_info("perf_counter").resolution * 1e9
    min_batch_ns = max(_MIN_TICKS_PER_BATCH * resolution_ns, 1.0)

    prev = 0
    for key in keys[:warmup_iterations]:
        prev = hash_fn(key ^ prev, n)

    best = None
    for _ in range(repetitions):
        batch_means = []
        for start in range(0, len(keys) - batch_size + 1, batch_size):
            batch = keys[start:start + batch_size]
            t0 = time.perf_counter_ns()
            for key in batch:
                prev = hash_fn(key ^ prev, n)
            elapsed = time.perf_counter_ns() - t0
            if elapsed < min_batch_ns:
                raise ClockResolutionError(
                    f"a batch of {batch_size} evaluations took {elapsed} ns, below "
                    f"{_MIN_TICKS_PER_BATCH}x the clock resolution ({resolution_ns:.0f} ns); "
                    "increase batch_size or keys_per_point"
                )
            batch_means.append(elapsed / batch_size)
        mean_ns = fmean(batch_means)
        if best is None or mean_ns < best[0]:
            p_low, p_high = np.percentile(batch_means, percentiles)
            best = (mean_ns, float(p_low), float(p_high))
    return best


def bench(config: BenchConfig) -> list[BenchRow]:
    """Time every configured (algorithm, n) point.

    Returns one row per point and appends them as CSV to
    ``config.output_path`` when set.  Keys come from the configured stream
    seed, so runs are reproducible key-wise (not time-wise).
    """
    rows = []
    with _quiesced():
        for algorithm in config.algorithms:
            hasher = make_hasher(algorithm, seed=config.seed)
            hash_fn = hasher.hash
            keys = [int(k) for k in key_stream(config.keys_per_point,
                                               stream_seed=config.seed)]
            for n in config.n_values:
                mean_ns, p_low, p_high = _time_point(
                    hash_fn, n, keys, config.batch_size,
                    config.warmup_iterations, config.percentiles,
                    repetitions=config.repetitions)
                rows.append(BenchRow(algorithm=algorithm, n=n, mean_ns=mean_ns,
                                     p10_ns=p_low, p90_ns=p_high))
    if config.output_path is not None:
        _append_csv(rows, config.output_path)
    return rows


def sawtooth_scan(n_min: int, n_max: int, keys_per_point: int, *,
                  algorithms: tuple[str, ...] = ("fliphash",), seed: int = 0,
                  batch_size: int | None = None, repetitions: int = 3,
                  output_path: str | None = None) -> list[BenchRow]:
    """Mean evaluation time for every n in [n_min, n_max], step 1.

    Fine-grained enough to expose the sawtooth: retries get likelier the
    farther n sits below the next power of two, so means peak just above
    each power of two and dip back at the next one.
    """
    if n_max < n_min:
        raise ValueError("empty scan range: n_max < n_min")
    if n_min < 1:
        raise ValueError("resource counts must be >= 1")
    if n_max - n_min > _SAWTOOTH_SPAN_LIMIT:
        raise ValueError(f"scan span is limited to {_SAWTOOTH_SPAN_LIMIT} points")
    if keys_per_point < 100:
        raise ValueError("keys_per_point must be >= 100")
    if batch_size is None:
        batch_size = min(1_000, keys_per_point)
    if not 100 <= batch_size <= keys_per_point:
        raise ValueError("need 100 <= batch_size <= keys_per_point")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")

    rows = []
    with _quiesced():
        for algorithm in algorithms:
            hasher = make_hasher(algorithm, seed=seed)
            hash_fn = hasher.hash
            keys = [int(k) for k in key_stream(keys_per_point, stream_seed=seed)]
            for n in range(n_min, n_max + 1):
                mean_ns, p_low, p_high = _time_point(
                    hash_fn, n, keys, batch_size, min(1_000, keys_per_point),
                    (10.0, 90.0), repetitions=repetitions)
                rows.append(BenchRow(algorithm=algorithm, n=n, mean_ns=mean_ns,
                                     p10_ns=p_low, p90_ns=p_high))
    if output_path is not None:
        _append_csv(rows, output_path)
    return rows


def write_csv(rows, handle) -> None:
    """Write rows as CSV with a header line."""
    writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_dict())


def _append_csv(rows, path: str) -> None:
    """Append rows to a CSV file, writing the header only when it is new."""
    with open(path, "a", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        if handle.tell() == 0:
            writer.writeheader()
        for row in rows:
            writer.writerow(row.to_dict())


def write_json_lines(rows, handle) -> None:
    """Write rows as one JSON object per line, mirroring the CSV fields."""
    for row in rows:
        handle.write(json.dumps(row.to_dict()) + "\n")


def rows_to_csv(rows) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()
