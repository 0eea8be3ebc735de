import logging
import time
from pathlib import Path
from typing import Optional

import click

from wcindex.commands import fail
from wcindex.services.errors import BudgetExceededError
from wcindex.services.index_file import load_index
from wcindex.services.oracles import oracle_enumerate, oracle_scan
from wcindex.services.stats import QueryCounters, build_stats_report
from wcindex.services.wildcard_engine import WildcardIndex
from wcindex.services.wildcard_pattern import WildcardPattern, parse_pattern

logger = logging.getLogger(__name__)

QUERY_ENGINES = ("accelerated", "baseline", "scan", "enumerate")


def _parse_patterns(patterns: tuple[str, ...], patterns_file: Optional[Path]) -> list[WildcardPattern]:
    raw = list(patterns)
    if patterns_file is not None:
        raw.extend(line.rstrip("\r\n") for line in patterns_file.read_text(encoding="utf-8").splitlines())
    if not raw:
        raise ValueError("give at least one --pattern or a --patterns-file")
    return [parse_pattern(p) for p in raw]


def _run(index: WildcardIndex, pattern: WildcardPattern, engine: str, counters: QueryCounters) -> list[int]:
    if engine == "scan":
        return oracle_scan(index.text.alphabet.decode(index.text.text.tolist()), pattern)
    if engine == "enumerate":
        return oracle_enumerate(index.text, pattern)
    return index.match(pattern, engine, counters)


@click.command(help="Report the occurrences of wildcard patterns ('?' one symbol, '?{k}' k symbols).")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--pattern", "patterns", multiple=True, help="Pattern; repeat for several.")
@click.option("--patterns-file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--engine", type=click.Choice(QUERY_ENGINES), default="accelerated", show_default=True)
@click.option("--count", "count_only", is_flag=True, help="Print only the number of occurrences.")
@click.option("--stats", "show_stats", is_flag=True, help="Append key=value counters and structure sizes.")
def query_cmd(index_path, patterns, patterns_file, engine, count_only, show_stats):
    try:
        parsed = _parse_patterns(patterns, patterns_file)
        index = load_index(index_path)
    except ValueError as e:
        fail(str(e))

    counters = QueryCounters()
    started = time.perf_counter()
    for pattern in parsed:
        try:
            positions = _run(index, pattern, engine, counters)
        except BudgetExceededError as e:
            fail(str(e))
        if len(parsed) > 1:
            click.echo(f"# {pattern}")
        if count_only:
            click.echo(str(len(positions)))
        else:
            for p in positions:
                click.echo(str(p))
    elapsed = time.perf_counter() - started

    if show_stats:
        report = build_stats_report(index, counters, {**index.timings, "queries": elapsed})
        click.echo("# stats")
        for line in report.to_lines():
            click.echo(line)
