"""JumpHash baseline tests against an independent transcription."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fliphash import JumpHash, jump_hash, key_stream
from fliphash.statlab import scan_monotonicity

U64 = st.integers(min_value=0, max_value=2**64 - 1)


def reference_jump(key, num_buckets):
    """Line-by-line transcription of the published pseudocode, kept
    independent of the library implementation on purpose."""
    assert num_buckets >= 1
    b = -1
    j = 0
    while j < num_buckets:
        b = j
        key = (key * 2862933555777941757 + 1) % 2**64
        j = int(float(b + 1) * (float(1 << 31) / float((key >> 33) + 1)))
    return b


class TestAgainstReference:
    def test_key_zero_two_buckets(self):
        assert jump_hash(0, 2) == reference_jump(0, 2)

    @given(key=U64, n=st.integers(min_value=1, max_value=10**9))
    @settings(max_examples=300)
    def test_matches_reference(self, key, n):
        assert jump_hash(key, n) == reference_jump(key, n)

    def test_matches_reference_large_ranges(self):
        for key in (0, 1, 2**63, 2**64 - 1):
            for n in (2**31, 2**53, 2**63):
                assert jump_hash(key, n) == reference_jump(key, n)


class TestContracts:
    def test_single_bucket(self):
        for key in (0, 1, 2**64 - 1):
            assert jump_hash(key, 1) == 0

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            jump_hash(1, 0)
        with pytest.raises(ValueError):
            jump_hash(1, 2**63 + 1)
        with pytest.raises(ValueError):
            jump_hash(-1, 10)
        with pytest.raises(ValueError):
            JumpHash(seed=2**64)

    @given(key=U64, n=st.integers(min_value=1, max_value=2**63))
    @settings(max_examples=200)
    def test_range_containment(self, key, n):
        assert 0 <= jump_hash(key, n) < n

    def test_seed_folds_into_key(self):
        hasher = JumpHash(seed=0xABCDEF)
        for key in (0, 17, 2**40):
            assert hasher.hash(key, 1000) == jump_hash(key ^ 0xABCDEF, 1000)

    def test_bulk_matches_scalar(self):
        keys = key_stream(2_000, stream_seed=41)
        hasher = JumpHash(seed=9)
        for n in (1, 2, 3, 100, 1024, 10**9, 2**40):
            bulk = hasher.hash_many(keys, n)
            scalar = [hasher.hash(int(k), n) for k in keys]
            assert [int(v) for v in bulk] == scalar

    def test_bulk_beyond_float_window_matches_scalar(self):
        # Above 2**53 the vectorized path hands off to the scalar routine.
        keys = key_stream(50, stream_seed=43)
        hasher = JumpHash()
        n = 2**60
        bulk = hasher.hash_many(keys, n)
        assert [int(v) for v in bulk] == [hasher.hash(int(k), n) for k in keys]


class TestMonotonicity:
    def test_no_illegal_moves_up_to_1024(self):
        keys = key_stream(10_000, stream_seed=47)
        reports = scan_monotonicity(JumpHash(), 1, 1024, keys)
        assert all(report.illegal_moves == 0 for report in reports)
