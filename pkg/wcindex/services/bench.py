# wcindex/services/bench.py

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from wcindex.config import BENCH_SIZES, DEFAULT_SEED
from wcindex.services.stats import QueryCounters, build_stats_report, mean_counters
from wcindex.services.verification import VerifyConfig, alphabet_bytes, random_pattern, random_text
from wcindex.services.wildcard_engine import build_index

logger = logging.getLogger(__name__)


@dataclass
class BenchRow:
    """One size's measurements."""

    n: int
    sigma: int
    build_seconds: float
    query_seconds: float
    auxiliary_bits: int
    bits_per_symbol: float
    bits: dict                      # estimated bits per structure
    mean_counters: dict = field(default_factory=dict)

    @property
    def nlogn_ratio(self) -> float:
        """Auxiliary bits over n log2 n."""
        return self.auxiliary_bits / max(1.0, self.n * np.log2(max(2, self.n)))

    def as_record(self) -> dict:
        record = {
            "n": self.n,
            "sigma": self.sigma,
            "build_seconds": round(self.build_seconds, 4),
            "query_seconds": round(self.query_seconds, 4),
            "auxiliary_bits": self.auxiliary_bits,
            "bits_per_symbol": round(self.bits_per_symbol, 4),
            "aux_over_nlogn": round(self.nlogn_ratio, 6),
        }
        record.update({f"bits.{k}": v for k, v in self.bits.items()})
        record.update({f"mean.{k}": round(v, 3) for k, v in self.mean_counters.items()})
        return record


def bench_size(
    n: int,
    *,
    sigma: int = 4,
    queries: int = 50,
    seed: int = DEFAULT_SEED,
    engine: str = "accelerated",
    sampling: Optional[str] = None,
) -> BenchRow:
    rng = np.random.default_rng([seed, n])
    text = random_text(rng, n, sigma)
    started = time.perf_counter()
    index = build_index(text, alphabet=alphabet_bytes(sigma), sampling=sampling)
    build_seconds = time.perf_counter() - started

    cfg = VerifyConfig()
    rows: list[QueryCounters] = []
    started = time.perf_counter()
    for _ in range(queries):
        counters = QueryCounters()
        index.match(random_pattern(rng, text, sigma, cfg), engine, counters)
        rows.append(counters)
    query_seconds = time.perf_counter() - started

    report = build_stats_report(index, timings=index.timings)
    return BenchRow(
        n=index.n,
        sigma=sigma,
        build_seconds=build_seconds,
        query_seconds=query_seconds,
        auxiliary_bits=report.auxiliary_bits,
        bits_per_symbol=report.bits_per_symbol,
        bits=dict(report.bits),
        mean_counters=mean_counters(rows),
    )


def run_bench(
    sizes: Sequence[int] = BENCH_SIZES,
    *,
    sigma: int = 4,
    queries: int = 50,
    seed: int = DEFAULT_SEED,
    engine: str = "accelerated",
    sampling: Optional[str] = None,
    output: Optional[Union[str, Path]] = None,
    progress: bool = False,
) -> pd.DataFrame:
    """One row per text size; written as CSV when `output` is given."""
    records = []
    for n in tqdm(sizes, desc="bench", disable=not progress):
        row = bench_size(n, sigma=sigma, queries=queries, seed=seed, engine=engine, sampling=sampling)
        logger.info("bench n=%d: %.2f bits/symbol, build %.2fs", row.n, row.bits_per_symbol, row.build_seconds)
        records.append(row.as_record())
    frame = pd.DataFrame(records)
    if output is not None:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(output, index=False)
        logger.info("bench report written to %s", output)
    return frame
