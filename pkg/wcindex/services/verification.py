# wcindex/services/verification.py

from __future__ import annotations

import concurrent.futures
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from wcindex.config import DEFAULT_SEED, ENUMERATE_BUDGET
from wcindex.services.errors import BudgetExceededError
from wcindex.services.group_lcp import SAMPLING_LEVELS
from wcindex.services.index_file import from_bytes, to_bytes
from wcindex.services.oracles import oracle_enumerate, oracle_scan
from wcindex.services.partition import build_partition
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_core import build_text_index, preprocess_pattern
from wcindex.services.suffix_tree import Location, build_suffix_tree, naive_descend
from wcindex.services.wildcard_engine import (
    WildcardIndex,
    accelerated_budget,
    baseline_budget,
    build_index,
)
from wcindex.services.wildcard_pattern import WildcardPattern

logger = logging.getLogger(__name__)

SUITES = ("suffix_core", "unrooted_small", "unrooted_full", "structure", "wildcard", "serialization")


@dataclass(frozen=True)
class VerifyConfig:
    n: int = 256                               # largest text length drawn
    sigmas: tuple[int, ...] = (2, 4, 8)
    taus: tuple[int, ...] = (2, 4, 8)
    lambdas: tuple[int, ...] = (2, 3)
    patterns: int = 5                          # wildcard patterns per built index
    probes: int = 20                           # pattern suffixes per probed node
    max_pieces: int = 4
    max_run: int = 2
    max_wildcards: int = 4
    enumerate_budget: int = ENUMERATE_BUDGET


@dataclass(frozen=True)
class TrialOutcome:
    suite: str
    trial: int
    message: Optional[str]                     # None when every check passed

    @property
    def ok(self) -> bool:
        return self.message is None


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    trials: int
    failures: int
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class VerificationSummary:
    seed: int
    config: VerifyConfig
    results: list[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "suite": r.suite,
                    "trials": r.trials,
                    "failures": r.failures,
                    "status": "pass" if r.passed else "FAIL",
                    "first_failure": r.first_failure or "",
                }
                for r in self.results
            ]
        )

    def to_lines(self) -> list[str]:
        lines = [
            f"{r.suite}: {'pass' if r.passed else 'FAIL'} ({r.trials - r.failures}/{r.trials})"
            + (f" first failure: {r.first_failure}" if r.first_failure else "")
            for r in self.results
        ]
        lines.append(f"seed={self.seed} overall={'pass' if self.passed else 'FAIL'}")
        return lines


# ----------------------------
# Random inputs
# ----------------------------
def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    """Independent stream per (seed, suite, trial)."""
    return np.random.default_rng([seed, SUITES.index(suite), trial])


def alphabet_bytes(sigma: int) -> bytes:
    if sigma <= 26:
        return bytes(range(ord("a"), ord("a") + sigma))
    return bytes(range(33, 33 + sigma))


def random_text(rng: np.random.Generator, n: int, sigma: int) -> bytes:
    letters = np.frombuffer(alphabet_bytes(sigma), dtype=np.uint8)
    return letters[rng.integers(0, sigma, size=n)].tobytes()


def random_literal(rng: np.random.Generator, text: bytes, sigma: int, max_len: int) -> bytes:
    """Half the time a text substring, otherwise random letters."""
    length = int(rng.integers(1, max_len + 1))
    if rng.random() < 0.5 and len(text) >= length:
        start = int(rng.integers(0, len(text) - length + 1))
        return text[start:start + length]
    return random_text(rng, length, sigma)


def random_pattern(rng: np.random.Generator, text: bytes, sigma: int, cfg: VerifyConfig) -> WildcardPattern:
    if rng.random() < 0.5 and len(text) > 1:
        # a text window with some symbols turned into wildcards
        length = int(rng.integers(1, min(len(text), 8) + 1))
        start = int(rng.integers(0, len(text) - length + 1))
        window = text[start:start + length]
        holes = set(rng.choice(length, size=min(length, int(rng.integers(0, cfg.max_wildcards + 1))), replace=False).tolist())
        pieces: list[tuple[int, bytes]] = []
        run, literal = 0, bytearray()
        for i, byte in enumerate(window):
            if i in holes:
                if literal:
                    pieces.append((run, bytes(literal)))
                    run, literal = 0, bytearray()
                run += 1
            else:
                literal.append(byte)
        pieces.append((run, bytes(literal)))
        return WildcardPattern.from_pieces(pieces)

    pieces = []
    budget = cfg.max_wildcards
    for i in range(int(rng.integers(1, cfg.max_pieces + 1))):
        k = min(budget, int(rng.integers(0 if i == 0 else 1, cfg.max_run + 1)))
        budget -= k
        pieces.append((k, random_literal(rng, text, sigma, 3) if rng.random() < 0.85 else b""))
    return WildcardPattern.from_pieces(pieces)


def _random_index(rng: np.random.Generator, cfg: VerifyConfig, **overrides) -> tuple[bytes, WildcardIndex]:
    sigma = int(rng.choice(cfg.sigmas))
    n = int(rng.integers(max(1, cfg.n // 4), cfg.n + 1))
    text = random_text(rng, n, sigma)
    params = dict(
        tau=int(rng.choice(cfg.taus)),
        lambda_=int(rng.choice(cfg.lambdas)),
        sampling=str(rng.choice(SAMPLING_LEVELS)),
        c_d=2,
        c_h=2,
        micro_block=2,
    )
    params.update(overrides)
    return text, build_index(text, alphabet=alphabet_bytes(sigma), **params)


def _symbols_of(idx, literal: bytes) -> tuple[int, ...]:
    return idx.alphabet.encode_literal(literal)


def _lcp(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


# ----------------------------
# Suites
# ----------------------------
def _suffix_core(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    sigma = int(rng.choice(cfg.sigmas))
    n = int(rng.integers(1, cfg.n + 1))
    text = random_text(rng, n, sigma)
    rate = int(rng.choice([1, 3]))
    idx = build_text_index(text, alphabet_bytes(sigma), sampling=rate)
    codes = idx.text.tolist()
    suffixes = [tuple(codes[i:]) for i in range(idx.n)]
    sa = sorted(range(idx.n), key=lambda i: suffixes[i])
    if idx.suffix_array().tolist() != sa:
        return "suffix array differs from a brute-force sort"
    for r, p in enumerate(sa):
        if idx.isa_lookup(p) != r:
            return f"isa_lookup({p}) != {r}"
        if r and idx.lcp_array[r] != _lcp(suffixes[sa[r - 1]], suffixes[p]):
            return f"lcp_array[{r}] wrong"
    for _ in range(cfg.probes):
        literal = _symbols_of(idx, random_literal(rng, text, sigma, 6))
        handle = preprocess_pattern(idx, literal)
        for j in range(len(literal)):
            tail = literal[j:]
            if handle.rank(j) != sum(1 for s in suffixes if s < tail):
                return f"rank of pattern suffix {j} of {literal} wrong"
            q = int(rng.integers(0, idx.n))
            if handle.lcp_with_suffix(j, q) != _lcp(tail, suffixes[sa[q]]):
                return f"pattern LCP of {tail} against rank {q} wrong"
    return None


def _unrooted_small(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    sigma = int(rng.choice(cfg.sigmas))
    n = int(rng.integers(max(1, cfg.n // 4), cfg.n + 1))
    text = random_text(rng, n, sigma)
    idx = build_text_index(text, alphabet_bytes(sigma))
    tree = build_suffix_tree(idx)
    tau = int(rng.choice(cfg.taus))
    literals = [_symbols_of(idx, random_literal(rng, text, sigma, 8)) for _ in range(cfg.probes)]
    handles = [preprocess_pattern(idx, lit) for lit in literals]
    c_d = int(rng.choice((2, 3, 4)))
    for level in SAMPLING_LEVELS:
        part = build_partition(tree, tau, level=level, c_d=c_d, c_h=2, micro_block=2)
        structures = [(half.trie, half.lcp) for g in part.groups for half in g.halves]
        structures.append((part.tm, part.tm_lcp))
        for trie, lcp in structures:
            for u in range(trie.node_count):
                handle = handles[int(rng.integers(0, len(handles)))]
                j = int(rng.integers(0, len(handle) + 1))
                counters = QueryCounters()
                got = lcp.query(u, handle, j, counters)
                want = trie.naive_descend(u, handle.pattern[j:])
                if got != want:
                    return f"{level}: node {trie.real(u)} pattern {handle.pattern[j:]} gave {got}, expected {want}"
                bound = 1 + lcp.c_d ** 2
                if lcp.level == "sampled" and counters.max_lookup_materializations > bound:
                    return (f"sampled: node {trie.real(u)} touched {counters.max_lookup_materializations} "
                            f"suffixes in one lookup, bound is {bound}")
    return None


def _unrooted_full(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    text, index = _random_index(rng, cfg)
    tree = index.tree
    sigma = index.sigma
    for _ in range(cfg.probes * 10):
        u = int(rng.integers(0, tree.node_count))
        start = Location(u)
        if u != tree.root and tree.edge_length(u) > 1 and rng.random() < 0.5:
            start = tree.make_location(tree.parent[u], u, int(rng.integers(1, tree.edge_length(u))))
        handle = index.preprocess(_symbols_of(index.text, random_literal(rng, text, sigma, 8)))
        j = int(rng.integers(0, len(handle) + 1))
        got = index.unrooted_lcp(start, handle, j)
        want = naive_descend(tree, start, handle.pattern[j:])
        if got != want:
            return f"unrooted LCP from {start} for {handle.pattern[j:]} gave {got}, expected {want}"

        if tree.is_leaf(u):
            continue
        hits = index.wildcard_lcp(u, handle, j)
        expected = {a for a, _ in tree.steps_all(Location(u))}
        if {h.symbol for h in hits} != expected:
            return f"wildcard LCP at node {u} answered symbols {[h.symbol for h in hits]}, expected {sorted(expected)}"
        for hit in hits:
            loc, matched = naive_descend(tree, Location(u), (hit.symbol,) + handle.pattern[j:])
            if (hit.location, hit.matched) != (loc, matched):
                return f"wildcard LCP at node {u} symbol {hit.symbol} gave {hit.location}/{hit.matched}, expected {loc}/{matched}"
            if hit.full != (matched == 1 + len(handle) - j):
                return f"wildcard LCP full flag wrong at node {u} symbol {hit.symbol}"
    return None


def _structure(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    _, index = _random_index(rng, cfg)
    tree = index.tree
    part = index.partition
    if part.marked_internal_count > part.marked_leaf_count:
        return "more marked internal nodes than marked leaves"
    for group in part.groups:
        if group.node_count > 4 * part.tau:
            return f"group {group.gid} has {group.node_count} nodes"
        for half in group.halves:
            if not half.trie.is_consecutive():
                return f"group {group.gid} {half.side} leaves are not consecutive"
            f = half.lcp.leaf_count
            if f > 1 and half.lcp.d_element_count > f * (math.ceil(math.log2(f)) + 1):
                return f"group {group.gid} predecessor sets too large"
    bound = index.layer.leaf_bound(part.marked_leaf_count)
    if index.layer.leaf_count > bound:
        return f"wildcard trees hold {index.layer.leaf_count} leaves, bound {bound}"
    limit = math.floor(math.log2(index.n)) + 1
    for leaf in tree.leaf_of_rank:
        if tree.heavy.crossings(leaf) > limit:
            return f"leaf {leaf} crosses more than {limit} heavy paths"
    running = 0
    for v in range(tree.node_count):
        if part.rank1(v) != running:
            return f"rank1({v}) wrong"
        running += part.is_marked(v)
        if part.is_marked(v) and part.tm_to_marked(part.marked_to_tm(v)) != v:
            return f"marked tree round trip fails at {v}"
    for u in part.marking.marked_internal:
        for child in tree.children[u]:
            group = part.route_child(u, tree.first_symbol(child))
            if group is None or child not in group.members:
                return f"router at {u} misses child {child}"
    return None


def check_wildcard_query(
    text: bytes, index: WildcardIndex, pattern: WildcardPattern, enumerate_budget: int
) -> tuple[Optional[str], list[int], QueryCounters, QueryCounters]:
    want = oracle_scan(text, pattern)
    try:
        enumerated = oracle_enumerate(index.text, pattern, enumerate_budget)
    except BudgetExceededError:
        enumerated = want
    base_counters, fast_counters = QueryCounters(), QueryCounters()
    base = index.match_baseline(pattern, base_counters)
    fast = index.match_accelerated(pattern, fast_counters)
    message = None
    if not want == enumerated == base == fast:
        message = f"pattern {pattern}: scan={want} enumerate={enumerated} baseline={base} accelerated={fast}"
    elif base_counters.standard_lcp > baseline_budget(pattern, index.sigma):
        message = f"pattern {pattern}: baseline used {base_counters.standard_lcp} queries"
    elif fast_counters.standard_lcp + fast_counters.wildcard_lcp > accelerated_budget(pattern, index.sigma):
        message = f"pattern {pattern}: accelerated used {fast_counters.standard_lcp + fast_counters.wildcard_lcp} queries"
    return message, fast, base_counters, fast_counters


def _wildcard(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    text, index = _random_index(rng, cfg)
    for _ in range(cfg.patterns):
        pattern = random_pattern(rng, text, index.sigma, cfg)
        message, *_ = check_wildcard_query(text, index, pattern, cfg.enumerate_budget)
        if message:
            return message
    return None


def _serialization(rng: np.random.Generator, cfg: VerifyConfig) -> Optional[str]:
    text, index = _random_index(rng, cfg)
    loaded = from_bytes(to_bytes(index))
    for _ in range(cfg.patterns):
        pattern = random_pattern(rng, text, index.sigma, cfg)
        for engine in ("baseline", "accelerated"):
            c1, c2 = QueryCounters(), QueryCounters()
            a = index.match(pattern, engine, c1)
            b = loaded.match(pattern, engine, c2)
            if a != b or c1 != c2:
                return f"pattern {pattern} ({engine}) differs after reload"
    return None


SUITE_FUNCS: dict[str, Callable[[np.random.Generator, VerifyConfig], Optional[str]]] = {
    "suffix_core": _suffix_core,
    "unrooted_small": _unrooted_small,
    "unrooted_full": _unrooted_full,
    "structure": _structure,
    "wildcard": _wildcard,
    "serialization": _serialization,
}


def run_trial(suite: str, seed: int, trial: int, cfg: VerifyConfig) -> TrialOutcome:
    rng = trial_rng(seed, suite, trial)
    try:
        message = SUITE_FUNCS[suite](rng, cfg)
    except Exception as e:  # a crash is a failed trial, reported with its seed
        message = f"{type(e).__name__}: {e}"
    if message:
        logger.warning("verify %s failed (seed=%d trial=%d): %s", suite, seed, trial, message)
    return TrialOutcome(suite, trial, message)


def run_verification(
    trials: int,
    *,
    seed: int = DEFAULT_SEED,
    suites: tuple[str, ...] = SUITES,
    config: VerifyConfig = VerifyConfig(),
    workers: int = 1,
    progress: bool = False,
) -> VerificationSummary:
    unknown = [s for s in suites if s not in SUITE_FUNCS]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []
    for suite in suites:
        jobs = [(suite, seed, t, config) for t in range(trials)]
        if workers > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
                outcomes = list(tqdm(executor.map(run_trial, *zip(*jobs)), total=trials,
                                     desc=suite, disable=not progress))
        else:
            outcomes = [run_trial(*job) for job in tqdm(jobs, desc=suite, disable=not progress)]
        failed = [o for o in outcomes if not o.ok]
        results.append(SuiteResult(
            suite=suite,
            trials=trials,
            failures=len(failed),
            first_failure=f"trial {failed[0].trial}: {failed[0].message}" if failed else None,
        ))
        logger.info("suite %s: %d/%d passed", suite, trials - len(failed), trials)
    return VerificationSummary(seed=seed, config=config, results=results)
