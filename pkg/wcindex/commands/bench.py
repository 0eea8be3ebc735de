import logging
from pathlib import Path

import click

from wcindex.commands import fail, parse_int_list
from wcindex.config import DEFAULT_SEED
from wcindex.services.bench import run_bench
from wcindex.services.group_lcp import SAMPLING_LEVELS

logger = logging.getLogger(__name__)


@click.command(help="Build indexes of growing size and report space and query counters.")
@click.option("--sizes", default=None, help="Comma-separated text lengths (default WCINDEX_BENCH_SIZES).")
@click.option("--sigma", type=int, default=4, show_default=True)
@click.option("--queries", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--engine", type=click.Choice(("accelerated", "baseline")), default="accelerated", show_default=True)
@click.option("--sampling", type=click.Choice(SAMPLING_LEVELS), default=None)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=Path("artifacts/bench.csv"),
              show_default=True)
@click.option("--progress", is_flag=True)
def bench_cmd(sizes, sigma, queries, seed, engine, sampling, output, progress):
    try:
        kwargs = {}
        if sizes:
            kwargs["sizes"] = parse_int_list(sizes, "sizes")
        if sigma < 1 or queries < 0:
            raise ValueError("sigma must be >= 1 and queries >= 0")
        frame = run_bench(
            sigma=sigma, queries=queries, seed=seed, engine=engine, sampling=sampling,
            output=output, progress=progress, **kwargs,
        )
    except ValueError as e:
        fail(str(e))

    columns = ["n", "build_seconds", "auxiliary_bits", "bits_per_symbol", "aux_over_nlogn"]
    click.echo(frame[columns].to_string(index=False))
    click.echo(f"report written to {output}")
