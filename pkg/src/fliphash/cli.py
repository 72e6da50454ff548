"""Command-line client for the hashing service.

Every subcommand builds an HTTP request against the service API.  By
default the service app is embedded in-process, so the CLI works without a
running server; pass ``--server URL`` to target a remote instance instead.

Exit codes: 0 success, 1 usage error, 2 failed ``--assert`` check,
3 I/O or transport error.
"""

from __future__ import annotations

import asyncio
import csv
import json
import sys

import click
import httpx

from .statlab import ACCEPTANCE_P_BOUNDS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2
EXIT_IO = 3

REMAP_FIELDS = ("n_before", "n_after", "moved_fraction", "illegal_moves")
BENCH_FIELDS = ("algorithm", "n", "mean_ns", "p10_ns", "p90_ns")
REPORT_FIELDS = ("chi_squared", "degrees_of_freedom", "p_value",
                 "l2_distance", "underpowered")


class CheckFailed(click.ClickException):
    """An ``--assert`` acceptance check did not hold."""

    exit_code = EXIT_CHECK_FAILED


class ServiceClient:
    """Minimal JSON-over-HTTP client for the service."""

    def __init__(self, server: str | None = None):
        self._server = server
        self._app = None
        if server is None:
            from .service.app import create_app

            self._app = create_app()

    def post(self, path: str, payload: dict) -> dict:
        if self._server is not None:
            with httpx.Client(base_url=self._server, timeout=None) as client:
                response = client.post(path, json=payload)
        else:
            response = asyncio.run(self._post_embedded(path, payload))
        if response.status_code >= 500:
            raise click.ClickException(
                f"service error {response.status_code}: {response.text}")
        if response.status_code >= 400:
            raise click.UsageError(
                f"request rejected ({response.status_code}): {_detail(response)}")
        return response.json()

    async def _post_embedded(self, path: str, payload: dict) -> httpx.Response:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://fliphash",
                                     timeout=None) as client:
            return await client.post(path, json=payload)


def _detail(response: httpx.Response) -> str:
    try:
        return str(response.json().get("detail"))
    except Exception:
        return response.text


def _open_out(out: str | None):
    return open(out, "w", newline="") if out else sys.stdout


def _emit_rows(rows: list[dict], fields, fmt: str, out: str | None) -> None:
    handle = _open_out(out)
    try:
        if fmt == "json-lines":
            for row in rows:
                handle.write(json.dumps({k: row[k] for k in fields}) + "\n")
        else:
            writer = csv.DictWriter(handle, fieldnames=fields, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
    finally:
        if handle is not sys.stdout:
            handle.close()


def _emit_report(report: dict, fields, fmt: str | None, out: str | None) -> None:
    if fmt is None:
        handle = _open_out(out)
        try:
            for name in fields:
                handle.write(f"{name}={report[name]}\n")
        finally:
            if handle is not sys.stdout:
                handle.close()
    else:
        _emit_rows([report], fields, fmt, out)


def _assert_uniform(report: dict, label: str) -> None:
    low, high = ACCEPTANCE_P_BOUNDS
    if report.get("underpowered"):
        raise CheckFailed(f"{label}: test is underpowered, not a pass")
    if not low <= report["p_value"] <= high:
        raise CheckFailed(
            f"{label}: p_value {report['p_value']:.6g} outside [{low}, {high}]")


server_option = click.option("--server", default=None, metavar="URL",
                             help="Service URL; defaults to an embedded in-process app.")
format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json-lines"]),
                             default="csv", show_default=True)
report_format_option = click.option("--format", "fmt",
                                    type=click.Choice(["csv", "json-lines"]),
                                    default=None,
                                    help="Structured output instead of key=value lines.")
out_option = click.option("--out", default=None, type=click.Path(dir_okay=False),
                          help="Write output to a file instead of stdout.")
seed_option = click.option("--seed", default=0, show_default=True,
                           help="64-bit hasher seed.")
key_seed_option = click.option("--key-seed", default=0, show_default=True,
                               help="Seed of the generated key stream.")
algorithm_option = click.option("--algorithm", type=click.Choice(["fliphash", "jumphash"]),
                                default="fliphash", show_default=True)


@click.group()
def cli():
    """Consistent range hashing: placement, verification, benchmarks."""


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("fliphash.service.app:app", host=host, port=port)


@cli.command("hash")
@algorithm_option
@click.option("--key", "keys", multiple=True, type=int, required=True,
              help="Key to place; repeatable.")
@click.option("--n", required=True, type=int, help="Resource count.")
@seed_option
@click.option("--m", default=64, show_default=True, help="Retry bound.")
@server_option
def hash_cmd(algorithm, keys, n, seed, m, server):
    """Map keys to resource indices in [0, n)."""
    client = ServiceClient(server)
    body = client.post("/v1/hash", {"algorithm": algorithm, "keys": list(keys),
                                    "n": n, "seed": seed, "max_retries": m})
    for value in body["values"]:
        click.echo(value)


@cli.command()
@click.option("--key", required=True, type=int, help="Key to trace.")
@click.option("--n", required=True, type=int, help="Resource count.")
@seed_option
@click.option("--m", default=64, show_default=True, help="Retry bound.")
@out_option
@server_option
def trace(key, n, seed, m, out, server):
    """Show every intermediate of one evaluation."""
    client = ServiceClient(server)
    body = client.post("/v1/trace", {"key": key, "n": n, "seed": seed,
                                     "max_retries": m})
    handle = _open_out(out)
    try:
        handle.write(f"key={body['key']}\n")
        handle.write(f"n={body['n']}\n")
        handle.write(f"r={body['range_exponent']}\n")
        handle.write(f"d={body['pow2_value']}\n")
        handle.write(f"e={body['retries']}\n")
        handle.write(f"path={body['path']}\n")
        handle.write(f"value={body['value']}\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


@cli.command()
@algorithm_option
@click.option("--n", required=True, type=int, help="Resource count.")
@click.option("--keys", default=1_000_000, show_default=True,
              help="Number of generated keys.")
@seed_option
@key_seed_option
@click.option("--assert", "do_assert", is_flag=True,
              help="Exit 2 unless the p-value sits in the acceptance band.")
@report_format_option
@out_option
@server_option
def uniformity(algorithm, n, keys, seed, key_seed, do_assert, fmt, out, server):
    """Chi-squared and L2 uniformity of the key distribution."""
    client = ServiceClient(server)
    report = client.post("/v1/uniformity", {
        "algorithm": algorithm, "n": n, "num_keys": keys,
        "seed": seed, "key_seed": key_seed})
    _emit_report(report, REPORT_FIELDS, fmt, out)
    if do_assert:
        _assert_uniform(report, f"uniformity over {n} resources")


@cli.command()
@algorithm_option
@click.option("--n-min", required=True, type=int)
@click.option("--n-max", required=True, type=int)
@click.option("--keys", default=100_000, show_default=True,
              help="Number of generated keys.")
@seed_option
@key_seed_option
@click.option("--assert", "do_assert", is_flag=True,
              help="Exit 2 if any step shows an illegal move.")
@format_option
@out_option
@server_option
def remap(algorithm, n_min, n_max, keys, seed, key_seed, do_assert, fmt, out, server):
    """Per-step key movement while growing the resource count."""
    client = ServiceClient(server)
    body = client.post("/v1/remap", {
        "algorithm": algorithm, "n_min": n_min, "n_max": n_max,
        "num_keys": keys, "seed": seed, "key_seed": key_seed})
    _emit_rows(body["steps"], REMAP_FIELDS, fmt, out)
    if do_assert and body["total_illegal_moves"] > 0:
        raise CheckFailed(
            f"{body['total_illegal_moves']} illegal moves across "
            f"[{n_min}, {n_max}]; the hasher is not monotone")


@cli.command()
@algorithm_option
@click.option("--axis", type=click.Choice(["seed", "range"]), required=True)
@click.option("--n", type=int, default=None, help="Resource count (seed axis).")
@click.option("--other-seed", type=int, default=None,
              help="Second seed to compare against (seed axis).")
@click.option("--exp-low", type=int, default=None,
              help="Smaller range exponent (range axis).")
@click.option("--exp-high", type=int, default=None,
              help="Larger range exponent (range axis).")
@click.option("--keys", default=1_000_000, show_default=True,
              help="Number of generated keys.")
@seed_option
@key_seed_option
@click.option("--assert", "do_assert", is_flag=True,
              help="Exit 2 unless the independence test passes.")
@report_format_option
@out_option
@server_option
def independence(algorithm, axis, n, other_seed, exp_low, exp_high, keys, seed,
                 key_seed, do_assert, fmt, out, server):
    """Independence of hashes across seeds or across range sizes."""
    client = ServiceClient(server)
    body = client.post("/v1/independence", {
        "algorithm": algorithm, "axis": axis, "num_keys": keys, "seed": seed,
        "key_seed": key_seed, "n": n, "other_seed": other_seed,
        "exponent_low": exp_low, "exponent_high": exp_high})
    _emit_report(body["joint"], REPORT_FIELDS, fmt, out)
    if do_assert:
        _assert_uniform(body["joint"], f"{axis} independence")
        if body.get("remap_spread") is not None:
            _assert_uniform(body["remap_spread"], "remap spread")


@cli.command()
@click.option("--algorithm", "algorithms", multiple=True,
              type=click.Choice(["fliphash", "jumphash"]),
              help="Repeatable; defaults to both.")
@click.option("--n", "n_values", multiple=True, type=int,
              help="Resource count; repeatable.  Defaults to 10, 100, 1e3, 1e6, 1e9.")
@click.option("--keys", default=100_000, show_default=True,
              help="Keys hashed per (algorithm, n) point.")
@click.option("--warmup", default=1_000, show_default=True)
@click.option("--batch-size", default=1_000, show_default=True)
@click.option("--repetitions", default=3, show_default=True,
              help="Sweeps per point; the least-disturbed one is reported.")
@seed_option
@format_option
@out_option
@server_option
def bench(algorithms, n_values, keys, warmup, batch_size, repetitions, seed,
          fmt, out, server):
    """Wall-time comparison across resource counts."""
    client = ServiceClient(server)
    payload = {"keys_per_point": keys, "warmup_iterations": warmup,
               "batch_size": batch_size, "repetitions": repetitions,
               "seed": seed}
    if algorithms:
        payload["algorithms"] = list(algorithms)
    if n_values:
        payload["n_values"] = list(n_values)
    body = client.post("/v1/bench", payload)
    _emit_rows(body["rows"], BENCH_FIELDS, fmt, out)


@cli.command()
@click.option("--algorithm", "algorithms", multiple=True,
              type=click.Choice(["fliphash", "jumphash"]),
              help="Repeatable; defaults to fliphash.")
@click.option("--n-min", required=True, type=int)
@click.option("--n-max", required=True, type=int)
@click.option("--keys", default=10_000, show_default=True,
              help="Keys hashed per point.")
@click.option("--repetitions", default=3, show_default=True,
              help="Sweeps per point; the least-disturbed one is reported.")
@seed_option
@format_option
@out_option
@server_option
def sawtooth(algorithms, n_min, n_max, keys, repetitions, seed, fmt, out, server):
    """Fine-grained mean time scan over consecutive resource counts."""
    client = ServiceClient(server)
    payload = {"n_min": n_min, "n_max": n_max, "keys_per_point": keys,
               "repetitions": repetitions, "seed": seed}
    if algorithms:
        payload["algorithms"] = list(algorithms)
    body = client.post("/v1/sawtooth", payload)
    _emit_rows(body["rows"], BENCH_FIELDS, fmt, out)


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except CheckFailed as exc:
        exc.show()
        return EXIT_CHECK_FAILED
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except (OSError, httpx.TransportError) as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
