"""Shared fixtures: scripted hash families for golden-trace tests."""

import pytest

from fliphash import FlipHash, TableFamily, family_seed

# Arbitrary key used with the scripted families; the scripted values, not
# the key, drive the evaluation.
GOLDEN_KEY = 7

# Scripted first/second draws: 11 = 1011b as the base draw, 5 = 0101b for
# flips below bit 1, 13 = 1101b for flips below bit 3.
GOLDEN_POW2_TABLE = {
    (GOLDEN_KEY, family_seed(0, 0)): 11,
    (GOLDEN_KEY, family_seed(1, 0)): 5,
    (GOLDEN_KEY, family_seed(3, 0)): 13,
}

# Retry draws for ranges hanging off exponent 4: 12, 11, 15, then 6.
GOLDEN_RETRY_TABLE = {
    **GOLDEN_POW2_TABLE,
    (GOLDEN_KEY, family_seed(3, 1)): 12,
    (GOLDEN_KEY, family_seed(3, 2)): 11,
    (GOLDEN_KEY, family_seed(3, 3)): 15,
    (GOLDEN_KEY, family_seed(3, 4)): 6,
}

# Expected outputs for the scripted draws.
GOLDEN_POW2_VALUES = [0, 1, 2, 2, 14]  # exponents 0..4
GOLDEN_RANGE_VALUES = [0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 11, 12, 12, 14, 14]  # n = 1..16


@pytest.fixture
def golden_pow2_hasher():
    return FlipHash(family=TableFamily(GOLDEN_POW2_TABLE))


@pytest.fixture
def golden_hasher():
    return FlipHash(family=TableFamily(GOLDEN_RETRY_TABLE))
