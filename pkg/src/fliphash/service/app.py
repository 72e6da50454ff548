"""FastAPI service wrapping the range-hashing library.

One endpoint per operation: key placement (``/v1/hash``), evaluation
tracing, the statistical suites (uniformity, remap scanning, independence),
and the wall-time benchmarks.  Heavy endpoints run synchronously in the
worker threadpool; all underlying state is immutable, so concurrent
requests are safe.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import bench as bench_mod
from .. import statlab
from ..algorithms import make_hasher
from ..core import FlipHash
from ..keystream import key_stream
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="fliphash",
        description="Constant-time consistent range hashing, with a "
                    "statistical verification lab and benchmark harness.",
        version="0.1.0",
    )

    @app.get("/healthz", response_model=schemas.HealthResponse)
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/hash", response_model=schemas.HashResponse)
    def hash_keys(request: schemas.HashRequest):
        hasher = _build(request.algorithm, request.seed, request.max_retries)
        try:
            values = statlab.hash_array(hasher, request.keys, request.n)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "algorithm": request.algorithm,
            "n": request.n,
            "values": [int(v) for v in values],
        }

    @app.post("/v1/trace", response_model=schemas.TraceResponse)
    def trace(request: schemas.TraceRequest):
        hasher = FlipHash(seed=request.seed, max_retries=request.max_retries)
        try:
            record = hasher.trace(request.key, request.n)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "key": record.key,
            "n": record.n,
            "range_exponent": record.range_exponent,
            "pow2_value": record.pow2_value,
            "retries": list(record.retries),
            "path": record.path,
            "value": record.value,
        }

    @app.post("/v1/uniformity", response_model=schemas.UniformityReportModel)
    def uniformity(request: schemas.UniformityRequest):
        hasher = _build(request.algorithm, request.seed)
        keys = key_stream(request.num_keys, stream_seed=request.key_seed)
        try:
            histogram = statlab.build_histogram(
                lambda k: statlab.hash_array(hasher, k, request.n),
                request.n, keys)
            report = statlab.uniformity(histogram)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return report.to_dict()

    @app.post("/v1/remap", response_model=schemas.RemapResponse)
    def remap(request: schemas.RemapRequest):
        hasher = _build(request.algorithm, request.seed)
        keys = key_stream(request.num_keys, stream_seed=request.key_seed)
        try:
            reports = statlab.scan_monotonicity(hasher, request.n_min,
                                                request.n_max, keys)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "algorithm": request.algorithm,
            "steps": [r.to_dict() for r in reports],
            "total_illegal_moves": sum(r.illegal_moves for r in reports),
        }

    @app.post("/v1/independence", response_model=schemas.IndependenceResponse)
    def independence(request: schemas.IndependenceRequest):
        hasher = _build(request.algorithm, request.seed)
        keys = key_stream(request.num_keys, stream_seed=request.key_seed)
        try:
            joint = statlab.independence_check(
                hasher, request.axis, keys, n=request.n,
                other_seed=request.other_seed,
                exponent_low=request.exponent_low,
                exponent_high=request.exponent_high)
            spread = None
            if request.axis == "range":
                spread = statlab.remap_spread(
                    hasher, request.exponent_low, request.exponent_high,
                    keys).to_dict()
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"axis": request.axis, "joint": joint.to_dict(),
                "remap_spread": spread}

    @app.post("/v1/bench", response_model=schemas.BenchResponse)
    def run_bench(request: schemas.BenchRequest):
        try:
            config = bench_mod.BenchConfig(
                n_values=tuple(request.n_values),
                keys_per_point=request.keys_per_point,
                warmup_iterations=request.warmup_iterations,
                batch_size=request.batch_size,
                repetitions=request.repetitions,
                algorithms=tuple(request.algorithms),
                seed=request.seed,
            )
            rows = bench_mod.bench(config)
        except (ValueError, bench_mod.ClockResolutionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"rows": [row.to_dict() for row in rows]}

    @app.post("/v1/sawtooth", response_model=schemas.BenchResponse)
    def run_sawtooth(request: schemas.SawtoothRequest):
        try:
            rows = bench_mod.sawtooth_scan(
                request.n_min, request.n_max, request.keys_per_point,
                algorithms=tuple(request.algorithms),
                repetitions=request.repetitions, seed=request.seed)
        except (ValueError, bench_mod.ClockResolutionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"rows": [row.to_dict() for row in rows]}

    return app


def _build(algorithm: str, seed: int, max_retries: int = 64):
    return make_hasher(algorithm, seed=seed, max_retries=max_retries)


app = create_app()
