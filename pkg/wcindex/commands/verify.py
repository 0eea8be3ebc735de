import logging
from pathlib import Path

import click

from wcindex.commands import EXIT_VERIFY_FAILED, fail, parse_int_list
from wcindex.config import DEFAULT_SEED, DEFAULT_WORKERS
from wcindex.services.verification import SUITES, VerifyConfig, run_verification

logger = logging.getLogger(__name__)


def _parse_config(n: int, sigma: str, tau: str, lambda_: str, patterns: int) -> VerifyConfig:
    if n < 1:
        raise ValueError("n must be >= 1")
    if patterns < 1:
        raise ValueError("patterns must be >= 1")
    sigmas = parse_int_list(sigma, "sigma")
    if min(sigmas) < 1 or max(sigmas) > 200:
        raise ValueError("sigma values must lie in 1..200")
    return VerifyConfig(
        n=n,
        sigmas=sigmas,
        taus=parse_int_list(tau, "tau"),
        lambdas=parse_int_list(lambda_, "lambda"),
        patterns=patterns,
    )


@click.command(help="Cross-check every structure against brute-force oracles on random inputs.")
@click.option("--n", type=int, default=256, show_default=True, help="Largest random text length.")
@click.option("--sigma", default="2,4,8", show_default=True, help="Alphabet sizes to draw from.")
@click.option("--tau", default="2,4,8", show_default=True)
@click.option("--lambda", "lambda_", default="2,3", show_default=True)
@click.option("--trials", type=int, default=100, show_default=True, help="Trials per suite.")
@click.option("--patterns", type=int, default=5, show_default=True, help="Wildcard patterns per trial.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--suite", "suites", multiple=True, type=click.Choice(SUITES), help="Run only these suites.")
@click.option("--workers", type=int, default=DEFAULT_WORKERS, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--progress", is_flag=True)
def verify_cmd(n, sigma, tau, lambda_, trials, patterns, seed, suites, workers, csv_path, progress):
    try:
        config = _parse_config(n, sigma, tau, lambda_, patterns)
        summary = run_verification(
            trials,
            seed=seed,
            suites=tuple(suites) or SUITES,
            config=config,
            workers=max(1, workers),
            progress=progress,
        )
    except ValueError as e:
        fail(str(e))

    for line in summary.to_lines():
        click.echo(line)
    if csv_path is not None:
        summary.to_frame().to_csv(csv_path, index=False)
    if not summary.passed:
        raise click.exceptions.Exit(EXIT_VERIFY_FAILED)
