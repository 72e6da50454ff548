"""Request and response models of the hashing service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Algorithm = Literal["fliphash", "jumphash"]

_UINT64_MAX = 2**64 - 1

SeedField = Field(default=0, ge=0, le=_UINT64_MAX)


class HashRequest(BaseModel):
    algorithm: Algorithm = "fliphash"
    keys: list[int] = Field(min_length=1, max_length=1_000_000)
    n: int = Field(ge=1, le=_UINT64_MAX)
    seed: int = SeedField
    max_retries: int = Field(default=64, ge=1, lt=2**16)


class HashResponse(BaseModel):
    algorithm: Algorithm
    n: int
    values: list[int]


class TraceRequest(BaseModel):
    key: int = Field(ge=0, le=_UINT64_MAX)
    n: int = Field(ge=1, le=_UINT64_MAX)
    seed: int = SeedField
    max_retries: int = Field(default=64, ge=1, lt=2**16)


class TraceResponse(BaseModel):
    key: int
    n: int
    range_exponent: int
    pow2_value: int
    retries: list[int]
    path: Literal["A", "B", "C", "D"]
    value: int


class UniformityRequest(BaseModel):
    algorithm: Algorithm = "fliphash"
    n: int = Field(ge=1, le=2**26)
    num_keys: int = Field(default=1_000_000, ge=1, le=100_000_000)
    seed: int = SeedField
    key_seed: int = SeedField


class UniformityReportModel(BaseModel):
    chi_squared: float
    degrees_of_freedom: int
    p_value: float
    l2_distance: float
    underpowered: bool = False


class RemapStepModel(BaseModel):
    n_before: int
    n_after: int
    moved_fraction: float
    illegal_moves: int


class RemapRequest(BaseModel):
    algorithm: Algorithm = "fliphash"
    n_min: int = Field(ge=1)
    n_max: int = Field(ge=2)
    num_keys: int = Field(default=100_000, ge=1, le=10_000_000)
    seed: int = SeedField
    key_seed: int = SeedField


class RemapResponse(BaseModel):
    algorithm: Algorithm
    steps: list[RemapStepModel]
    total_illegal_moves: int


class IndependenceRequest(BaseModel):
    algorithm: Algorithm = "fliphash"
    axis: Literal["seed", "range"]
    num_keys: int = Field(default=1_000_000, ge=1, le=100_000_000)
    seed: int = SeedField
    key_seed: int = SeedField
    # seed axis
    n: Optional[int] = Field(default=None, ge=1, le=8_192)
    other_seed: Optional[int] = Field(default=None, ge=0, le=_UINT64_MAX)
    # range axis
    exponent_low: Optional[int] = Field(default=None, ge=0, le=64)
    exponent_high: Optional[int] = Field(default=None, ge=1, le=64)


class IndependenceResponse(BaseModel):
    axis: Literal["seed", "range"]
    joint: UniformityReportModel
    # Uniformity of remapped keys over the newly added range; range axis only.
    remap_spread: Optional[UniformityReportModel] = None


class BenchRequest(BaseModel):
    algorithms: list[Algorithm] = ["fliphash", "jumphash"]
    n_values: list[int] = [10, 100, 1_000, 1_000_000, 1_000_000_000]
    keys_per_point: int = Field(default=100_000, ge=1_000, le=10_000_000)
    warmup_iterations: int = Field(default=1_000, ge=0)
    batch_size: int = Field(default=1_000, ge=100)
    repetitions: int = Field(default=3, ge=1, le=25)
    seed: int = SeedField


class BenchRowModel(BaseModel):
    algorithm: Algorithm
    n: int
    mean_ns: float
    p10_ns: float
    p90_ns: float


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]


class SawtoothRequest(BaseModel):
    algorithms: list[Algorithm] = ["fliphash"]
    n_min: int = Field(ge=1)
    n_max: int = Field(ge=1)
    keys_per_point: int = Field(default=10_000, ge=100, le=1_000_000)
    repetitions: int = Field(default=3, ge=1, le=25)
    seed: int = SeedField


class HealthResponse(BaseModel):
    status: Literal["ok"]
