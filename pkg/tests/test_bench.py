"""Benchmark harness tests: config validation, output schema, scan shapes."""

import csv
import io
import json

import pytest

import fliphash.bench as bench_mod
from fliphash.bench import (
    BenchConfig,
    BenchRow,
    CSV_FIELDS,
    ClockResolutionError,
    bench,
    rows_to_csv,
    sawtooth_scan,
    write_csv,
    write_json_lines,
)


def tiny_config(**overrides):
    defaults = dict(n_values=(1,), keys_per_point=1_000, warmup_iterations=0,
                    batch_size=100)
    defaults.update(overrides)
    return BenchConfig(**defaults)


class TestBenchConfig:
    def test_n_values_are_sorted(self):
        config = tiny_config(n_values=(100, 1, 10))
        assert config.n_values == (1, 10, 100)

    def test_validation(self):
        with pytest.raises(ValueError):
            tiny_config(keys_per_point=999)
        with pytest.raises(ValueError):
            tiny_config(batch_size=99)
        with pytest.raises(ValueError):
            tiny_config(batch_size=2_000)  # larger than keys_per_point
        with pytest.raises(ValueError):
            tiny_config(n_values=())
        with pytest.raises(ValueError):
            tiny_config(n_values=(0,))
        with pytest.raises(ValueError):
            tiny_config(algorithms=("md5",))
        with pytest.raises(ValueError):
            tiny_config(percentiles=(90.0, 10.0))


class TestBench:
    def test_degenerate_single_resource(self):
        rows = bench(tiny_config())
        assert len(rows) == 2  # one per algorithm
        for row in rows:
            assert row.n == 1
            assert row.mean_ns > 0
            assert 0 < row.p10_ns <= row.p90_ns

    def test_row_count_and_order(self):
        rows = bench(tiny_config(n_values=(1, 2, 4), algorithms=("fliphash",)))
        assert [(r.algorithm, r.n) for r in rows] == [
            ("fliphash", 1), ("fliphash", 2), ("fliphash", 4)]

    def test_csv_output(self, tmp_path):
        out = tmp_path / "bench.csv"
        rows = bench(tiny_config(output_path=str(out)))
        content = out.read_text().splitlines()
        assert content[0] == ",".join(CSV_FIELDS)
        assert len(content) == 1 + len(rows)
        parsed = list(csv.DictReader(io.StringIO(out.read_text())))
        assert parsed[0]["algorithm"] == rows[0].algorithm
        assert float(parsed[0]["mean_ns"]) == pytest.approx(rows[0].mean_ns)

    def test_csv_append_keeps_single_header(self, tmp_path):
        out = tmp_path / "bench.csv"
        rows = bench(tiny_config(output_path=str(out)))
        rows += bench(tiny_config(output_path=str(out)))
        content = out.read_text().splitlines()
        assert content[0] == ",".join(CSV_FIELDS)
        assert len(content) == 1 + len(rows)
        assert not any(line.startswith("algorithm") for line in content[1:])

    def test_unwritable_output_path(self):
        with pytest.raises(OSError):
            bench(tiny_config(output_path="/nonexistent-dir/bench.csv"))

    def test_coarse_clock_reported_with_hint(self, monkeypatch):
        class CoarseClock:
            resolution = 1.0  # a one-second tick cannot time micro-batches

        monkeypatch.setattr(bench_mod.time, "get_clock_info",
                            lambda name: CoarseClock)
        with pytest.raises(ClockResolutionError, match="increase batch_size"):
            bench(tiny_config())


class TestWriters:
    def test_json_lines_mirrors_csv_fields(self):
        row = BenchRow(algorithm="fliphash", n=10, mean_ns=1.5, p10_ns=1.0,
                       p90_ns=2.0)
        buffer = io.StringIO()
        write_json_lines([row], buffer)
        payload = json.loads(buffer.getvalue())
        assert set(payload) == set(CSV_FIELDS)

    def test_rows_to_csv_round_trip(self):
        row = BenchRow(algorithm="jumphash", n=3, mean_ns=9.25, p10_ns=8.0,
                       p90_ns=11.0)
        parsed = list(csv.DictReader(io.StringIO(rows_to_csv([row]))))
        assert parsed[0]["n"] == "3"

    def test_write_csv_header_only_for_empty(self):
        buffer = io.StringIO()
        write_csv([], buffer)
        assert buffer.getvalue().strip() == ",".join(CSV_FIELDS)


class TestSawtooth:
    def test_scan_shape(self):
        rows = sawtooth_scan(2, 6, 500)
        assert [row.n for row in rows] == [2, 3, 4, 5, 6]
        assert all(row.algorithm == "fliphash" for row in rows)
        assert all(row.mean_ns > 0 for row in rows)

    def test_empty_range_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            sawtooth_scan(10, 9, 500)

    def test_span_limit(self):
        with pytest.raises(ValueError):
            sawtooth_scan(1, 20_002, 500)

    def test_validation(self):
        with pytest.raises(ValueError):
            sawtooth_scan(0, 5, 500)
        with pytest.raises(ValueError):
            sawtooth_scan(1, 5, 50)
        with pytest.raises(ValueError):
            sawtooth_scan(1, 5, 500, algorithms=("sha1",))
