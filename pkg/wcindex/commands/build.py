import logging
from pathlib import Path
from typing import Optional

import click

from wcindex.commands import fail
from wcindex.services.group_lcp import SAMPLING_LEVELS
from wcindex.services.index_file import save_index
from wcindex.services.stats import build_stats_report
from wcindex.services.wildcard_engine import build_index

logger = logging.getLogger(__name__)


def _parse_alphabet(value: str):
    value = (value or "infer").strip()
    if value == "infer":
        return "infer"
    if not value:
        raise ValueError("alphabet must be 'infer' or the list of allowed characters")
    return value.encode("utf-8")


def _read_text(input_path: Optional[Path], text: Optional[str]) -> bytes:
    if (input_path is None) == (text is None):
        raise ValueError("give exactly one of --input or --text")
    if text is not None:
        return text.encode("utf-8")
    return input_path.read_bytes()


@click.command(help="Build an index file from a text.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--text", default=None, help="Index this string instead of a file.")
@click.option("--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--alphabet", default="infer", show_default=True, help="'infer' or the allowed characters.")
@click.option("--tau", type=int, default=None, help="Leaf marking step (default from n and sigma).")
@click.option("--lambda", "lambda_", type=int, default=None, help="Alphabet group size.")
@click.option("--sampling", type=click.Choice(SAMPLING_LEVELS), default=None)
@click.option("--sa-sample-rate", type=int, default=None)
@click.option("--c-d", type=int, default=None)
@click.option("--c-h", type=int, default=None)
@click.option("--micro-block", type=int, default=None)
@click.option("--verify-pointers", is_flag=True, help="Check every wildcard pointer while building.")
@click.option("--stats", "show_stats", is_flag=True, help="Print the structure report.")
@click.option("--progress", is_flag=True, help="Show a progress bar while building wildcard trees.")
def build_cmd(input_path, text, output, alphabet, tau, lambda_, sampling, sa_sample_rate,
              c_d, c_h, micro_block, verify_pointers, show_stats, progress):
    try:
        raw = _read_text(input_path, text)
        index = build_index(
            raw,
            alphabet=_parse_alphabet(alphabet),
            tau=tau,
            lambda_=lambda_,
            sampling=sampling,
            sa_sample_rate=sa_sample_rate,
            c_d=c_d,
            c_h=c_h,
            micro_block=micro_block,
            verify=verify_pointers or None,
            progress=progress,
        )
        size = save_index(index, output)
    except ValueError as e:
        fail(str(e))

    click.echo(f"wrote {output} ({size} bytes, n={index.n}, sigma={index.sigma}, tau={index.params.tau})")
    if show_stats:
        for line in build_stats_report(index, timings=index.timings).to_lines():
            click.echo(line)
