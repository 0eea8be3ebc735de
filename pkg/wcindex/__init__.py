import logging
from pathlib import Path

from dotenv import load_dotenv

# Load .env from the repository root regardless of CWD
load_dotenv(Path(__file__).parent.parent / ".env")

import click

from wcindex.config import LOG_FORMAT, LOG_LEVEL
from wcindex.commands.bench import bench_cmd
from wcindex.commands.build import build_cmd
from wcindex.commands.query import query_cmd
from wcindex.commands.verify import verify_cmd


def create_cli() -> click.Group:
    logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.WARNING), format=LOG_FORMAT)

    @click.group(help="Wildcard pattern matching over a suffix-tree text index.")
    def cli():
        pass

    cli.add_command(build_cmd, name="build")
    cli.add_command(query_cmd, name="query")
    cli.add_command(verify_cmd, name="verify")
    cli.add_command(bench_cmd, name="bench")
    return cli
