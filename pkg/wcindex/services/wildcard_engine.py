# wcindex/services/wildcard_engine.py

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence, Union

from wcindex.config import (
    DEBUG_VERIFY,
    DEFAULT_SA_SAMPLE_RATE,
    DEFAULT_SAMPLING,
    default_c_d,
    default_c_h,
    default_lambda,
    default_micro_block,
    default_tau,
)
from wcindex.services.errors import IndexRangeError, ParameterError
from wcindex.services.group_lcp import check_sampling_level
from wcindex.services.partition import GroupAnswer, PartitionIndex, build_partition
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_core import (
    SENTINEL,
    AlphabetSpec,
    PatternHandle,
    TextIndex,
    build_text_index,
    preprocess_pattern,
)
from wcindex.services.suffix_tree import Location, SuffixTree, build_suffix_tree
from wcindex.services.wildcard_pattern import WildcardPattern, as_pattern
from wcindex.services.wildcard_trees import AlphabetGroups, WildcardLayer, WildcardTree, build_wildcard_trees

logger = logging.getLogger(__name__)

ENGINES = ("baseline", "accelerated")


@dataclass(frozen=True)
class IndexParams:
    tau: int
    lambda_: int
    sampling: str
    sa_sample_rate: int
    c_d: int
    c_h: int
    micro_block: int
    alphabet: tuple[int, ...]

    @classmethod
    def resolve(
        cls,
        n: int,
        alphabet: Sequence[int],
        *,
        tau: Optional[int] = None,
        lambda_: Optional[int] = None,
        sampling: Optional[str] = None,
        sa_sample_rate: Optional[int] = None,
        c_d: Optional[int] = None,
        c_h: Optional[int] = None,
        micro_block: Optional[int] = None,
    ) -> "IndexParams":
        sigma = len(alphabet)
        params = cls(
            tau=default_tau(n, sigma) if tau is None else int(tau),
            lambda_=default_lambda(n) if lambda_ is None else int(lambda_),
            sampling=check_sampling_level(sampling or DEFAULT_SAMPLING),
            sa_sample_rate=DEFAULT_SA_SAMPLE_RATE if sa_sample_rate is None else int(sa_sample_rate),
            c_d=default_c_d(n) if c_d is None else int(c_d),
            c_h=default_c_h(n) if c_h is None else int(c_h),
            micro_block=default_micro_block(n) if micro_block is None else int(micro_block),
            alphabet=tuple(int(a) for a in alphabet),
        )
        if params.tau < 2:
            raise ParameterError(f"tau must be >= 2, got {params.tau}")
        if params.lambda_ < 1:
            raise ParameterError(f"lambda must be >= 1, got {params.lambda_}")
        if min(params.sa_sample_rate, params.c_d, params.c_h, params.micro_block) < 1:
            raise ParameterError("sampling steps must be >= 1")
        return params

    def as_dict(self) -> dict:
        out = asdict(self)
        out["alphabet"] = list(self.alphabet)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "IndexParams":
        return cls(**{**data, "alphabet": tuple(data["alphabet"])})


@dataclass(frozen=True)
class WildcardHit:
    symbol: int
    location: Location
    matched: int          # symbols matched below u, the wildcard included
    full: bool


@dataclass
class WildcardIndex:
    text: TextIndex
    tree: SuffixTree
    partition: PartitionIndex
    layer: WildcardLayer
    params: IndexParams
    timings: dict = field(default_factory=dict)
    debug_verify: bool = DEBUG_VERIFY

    @property
    def n(self) -> int:
        return self.text.n

    @property
    def sigma(self) -> int:
        return self.text.sigma

    def preprocess(self, symbols: Sequence[int], counters: QueryCounters | None = None) -> PatternHandle:
        return preprocess_pattern(self.text, symbols, counters=counters)

    # ----------------------------
    # Unrooted LCP over the whole tree
    # ----------------------------
    def _follow_edge(
        self, loc: Location, handle: PatternHandle, j: int, counters: QueryCounters | None
    ) -> tuple[Optional[Location], int]:
        """Match along the rest of loc's edge; (stop location, n) or (None, rest) when the edge is used up."""
        tree = self.tree
        rest = tree.depth[loc.child] - tree.depth[loc.upper] - loc.offset
        position = tree.label_start[loc.child] + loc.offset
        if counters is not None:
            counters.edge_checks += 1
        matched = min(rest, handle.lcp_with_suffix(j, self.text.isa_lookup(position, counters), counters))
        if matched < rest:
            return tree.make_location(loc.upper, loc.child, loc.offset + matched), matched
        return None, rest

    def _descend_marked(
        self, u: int, handle: PatternHandle, j: int, counters: QueryCounters | None
    ) -> GroupAnswer:
        part = self.partition
        tree = self.tree
        tm_loc, _ = part.unrooted_lcp_marked(part.marked_to_tm(u), handle, j, counters)
        w = part.tm_to_marked(tm_loc.upper)
        base = tree.depth[w] - tree.depth[u]
        if j + base >= len(handle) or tree.is_leaf(w):
            return GroupAnswer(Location(w), base)
        group = part.route_child(w, handle.symbol(j + base))
        if group is None:
            return GroupAnswer(Location(w), base)
        answer = part.query_group(group, w, handle, j + base, counters)
        return GroupAnswer(answer.location, base + answer.matched, answer.resume_at)

    def unrooted_lcp(
        self, start: Location, handle: PatternHandle, j: int, counters: QueryCounters | None = None
    ) -> tuple[Location, int]:
        """Where the search for P[j..] from `start` ends, and how many symbols it matched."""
        m = len(handle)
        if not 0 <= j <= m:
            raise IndexRangeError(f"pattern suffix {j} outside 0..{m}")
        if counters is not None:
            counters.unrooted_full_calls += 1
        if j == m:
            return start, 0
        total = 0
        node = start.upper
        if start.offset > 0:
            stop, total = self._follow_edge(start, handle, j, counters)
            if stop is not None:
                return stop, total
            node = start.child
        while j + total < m:
            if self.partition.is_marked(node):
                answer = self._descend_marked(node, handle, j + total, counters)
            else:
                group = self.partition.group_of(node)
                answer = self.partition.query_group(group, node, handle, j + total, counters)
            total += answer.matched
            if answer.location is not None:
                return answer.location, total
            node = answer.resume_at
        return Location(node), total

    # ----------------------------
    # Wildcard LCP
    # ----------------------------
    def _finish_in_group(
        self, loc: Location, handle: PatternHandle, j: int, counters: QueryCounters | None
    ) -> tuple[Location, int]:
        """Continue from a pointer target; no marked node should lie below it on the way."""
        part = self.partition
        tree = self.tree
        if j >= len(handle):
            return loc, 0
        matched = 0
        node = loc.upper
        if loc.offset > 0:
            stop, matched = self._follow_edge(loc, handle, j, counters)
            if stop is not None:
                return stop, matched
            node = loc.child
            if j + matched >= len(handle):
                return Location(node), matched
            if part.is_marked(node):
                return self._straddle(node, handle, j, matched, counters)
        if part.is_marked(node):
            if tree.is_leaf(node):
                return Location(node), matched
            group = part.route_child(node, handle.symbol(j + matched))
            if group is None:
                return Location(node), matched
        else:
            group = part.group_of(node)
        answer = part.query_group(group, node, handle, j + matched, counters)
        matched += answer.matched
        if answer.location is not None:
            return answer.location, matched
        return self._straddle(answer.resume_at, handle, j, matched, counters)

    def _straddle(
        self, node: int, handle: PatternHandle, j: int, matched: int, counters: QueryCounters | None
    ) -> tuple[Location, int]:
        if counters is not None:
            counters.group_straddles += 1
        log = logger.warning if self.debug_verify else logger.debug
        log("wildcard continuation left its group at marked node %d; finishing with a full query", node)
        loc, more = self.unrooted_lcp(Location(node), handle, j + matched, counters)
        return loc, matched + more

    def _tree_hits(
        self, u: int, wt: WildcardTree, handle: PatternHandle, j: int, counters: QueryCounters | None
    ) -> list[WildcardHit]:
        if counters is not None:
            counters.wildcard_tree_probes += 1
        tree = self.tree
        remaining = len(handle) - j
        found, l = wt.search(handle, j, counters)
        lower = found.lower
        hits = []
        for a in wt.symbols:
            ptr = wt.pointer(lower, a)
            if ptr is not None:
                if found.offset == 0:
                    at = ptr.location
                else:
                    at = tree.location_at_depth(ptr.location.lower, tree.depth[u] + 1 + l)
                loc, more = self._finish_in_group(at, handle, j + l, counters)
                hits.append(WildcardHit(a, loc, 1 + l + more, l + more == remaining))
                continue
            # the full label is absent for a: climb to the deepest node that has a pointer
            v = found.upper if found.offset > 0 else wt.parent(found.upper)
            while wt.pointer(v, a) is None:
                v = wt.parent(v)
            depth = wt.depth(v)
            loc, more = self.unrooted_lcp(wt.pointer(v, a).location, handle, j + depth, counters)
            hits.append(WildcardHit(a, loc, 1 + depth + more, depth + more == remaining))
        return hits

    def wildcard_lcp(
        self, u: int, handle: PatternHandle, j: int, counters: QueryCounters | None = None
    ) -> list[WildcardHit]:
        """
        For every symbol a with a child edge at u: where the search for
        a.P[j..] from u ends. Marked nodes answer through their wildcard
        trees plus one standard query on the heavy edge; other nodes resolve
        each symbol from one symbol down.
        """
        tree = self.tree
        remaining = len(handle) - j
        if remaining < 0:
            raise IndexRangeError(f"pattern suffix {j} outside 0..{len(handle)}")
        if tree.is_leaf(u):
            return []
        trees = self.layer.trees.get(u)
        hits: list[WildcardHit] = []
        if trees is None:
            for a, down in tree.steps_all(Location(u)):
                loc, more = self.unrooted_lcp(down, handle, j, counters)
                hits.append(WildcardHit(a, loc, 1 + more, more == remaining))
            return hits

        a_h = self.layer.heavy_symbol[u]
        if a_h != SENTINEL:
            down = tree.step_down(Location(u), a_h)
            loc, more = self.unrooted_lcp(down, handle, j, counters)
            hits.append(WildcardHit(a_h, loc, 1 + more, more == remaining))
        for wt in trees:
            hits.extend(self._tree_hits(u, wt, handle, j, counters))
        hits.sort(key=lambda h: h.symbol)
        return hits

    # ----------------------------
    # Matching
    # ----------------------------
    def _expand(self, frontier: list[Location], k: int, counters: QueryCounters) -> list[Location]:
        for _ in range(k):
            counters.edge_checks += len(frontier)
            frontier = [down for loc in frontier for _, down in self.tree.steps_all(loc)]
        return frontier

    def _encode(self, pattern: WildcardPattern) -> Optional[list[tuple[int, tuple[int, ...]]]]:
        if pattern.length > self.n - 1:
            return None
        return pattern.encode(self.text.alphabet)

    def match_baseline(
        self, pattern: Union[WildcardPattern, str, bytes], counters: QueryCounters | None = None
    ) -> list[int]:
        """One unrooted LCP query per frontier location and literal piece."""
        pattern = as_pattern(pattern)
        counters = counters if counters is not None else QueryCounters()
        pieces = self._encode(pattern)
        if pieces is None:
            return []
        frontier = [Location(self.tree.root)]
        for k, literal in pieces:
            frontier = self._expand(frontier, k, counters)
            if literal and frontier:
                handle = self.preprocess(literal, counters)
                survivors = []
                for loc in frontier:
                    counters.standard_lcp += 1
                    found, matched = self.unrooted_lcp(loc, handle, 0, counters)
                    if matched == len(literal):
                        survivors.append(found)
                frontier = survivors
        return self.report_occurrences([(loc, True) for loc in frontier], pattern.length)

    def match_accelerated(
        self, pattern: Union[WildcardPattern, str, bytes], counters: QueryCounters | None = None
    ) -> list[int]:
        """The last wildcard before each literal piece is resolved by one wildcard LCP query per node."""
        pattern = as_pattern(pattern)
        counters = counters if counters is not None else QueryCounters()
        pieces = self._encode(pattern)
        if pieces is None:
            return []
        frontier = [Location(self.tree.root)]
        for k, literal in pieces:
            if not literal:
                frontier = self._expand(frontier, k, counters)
                continue
            if not frontier:
                break
            handle = self.preprocess(literal, counters)
            if k == 0:
                survivors = []
                for loc in frontier:
                    counters.standard_lcp += 1
                    found, matched = self.unrooted_lcp(loc, handle, 0, counters)
                    if matched == len(literal):
                        survivors.append(found)
                frontier = survivors
                continue
            frontier = self._expand(frontier, k - 1, counters)
            survivors = []
            for loc in frontier:
                if loc.offset == 0:
                    if self.tree.is_leaf(loc.upper):
                        continue
                    counters.wildcard_lcp += 1
                    survivors.extend(h.location for h in self.wildcard_lcp(loc.upper, handle, 0, counters) if h.full)
                    continue
                # mid-edge: the wildcard takes the next edge symbol
                for _, down in self.tree.steps_all(loc):
                    counters.standard_lcp += 1
                    found, matched = self.unrooted_lcp(down, handle, 0, counters)
                    if matched == len(literal):
                        survivors.append(found)
            frontier = survivors
        return self.report_occurrences([(loc, True) for loc in frontier], pattern.length)

    def match(
        self,
        pattern: Union[WildcardPattern, str, bytes],
        engine: str = "accelerated",
        counters: QueryCounters | None = None,
    ) -> list[int]:
        if engine == "baseline":
            return self.match_baseline(pattern, counters)
        if engine == "accelerated":
            return self.match_accelerated(pattern, counters)
        raise ParameterError(f"unknown engine {engine!r}; expected one of {ENGINES}")

    def report_occurrences(
        self, loci: Iterable[tuple[Location, bool]], length: int = 0
    ) -> list[int]:
        """Text positions under every fully matched locus, ascending."""
        last = min(self.n - 2, self.n - 1 - length)
        positions: set[int] = set()
        for loc, full in loci:
            if not full:
                continue
            lo, hi = self.tree.leaf_interval(loc)
            for rank in range(lo, hi + 1):
                p = self.text.sa_lookup(rank)
                if p <= last:
                    positions.add(p)
        return sorted(positions)


# ----------------------------
# Query budgets
# ----------------------------
def baseline_budget(pattern: WildcardPattern, sigma: int) -> int:
    """1 + sum of sigma**g_i over literal pieces, g_i the wildcards before piece i."""
    return 1 + sum(
        sigma ** g for g, (_, literal) in zip(pattern.prefix_wildcards(), pattern.pieces) if literal
    )


def accelerated_budget(pattern: WildcardPattern, sigma: int) -> int:
    if sigma >= 2:
        return max(1, sigma ** pattern.g)
    return max(1, pattern.d)


# ----------------------------
# Construction
# ----------------------------
def assemble_index(
    text: TextIndex,
    params: IndexParams,
    *,
    tree: Optional[SuffixTree] = None,
    verify: Optional[bool] = None,
    progress: bool = False,
) -> WildcardIndex:
    verify = DEBUG_VERIFY if verify is None else verify
    timings: dict[str, float] = {}
    started = time.perf_counter()
    if tree is None:
        tree = build_suffix_tree(text)
    timings["suffix_tree"] = time.perf_counter() - started

    started = time.perf_counter()
    partition = build_partition(
        tree, params.tau, level=params.sampling, c_d=params.c_d, c_h=params.c_h, micro_block=params.micro_block
    )
    timings["partition"] = time.perf_counter() - started

    started = time.perf_counter()
    layer = build_wildcard_trees(
        partition, AlphabetGroups(text.sigma, params.lambda_), verify=verify, progress=progress
    )
    timings["wildcard_trees"] = time.perf_counter() - started
    logger.info("index ready n=%d sigma=%d tau=%d lambda=%d sampling=%s",
                text.n, text.sigma, params.tau, params.lambda_, params.sampling)
    return WildcardIndex(text=text, tree=tree, partition=partition, layer=layer,
                         params=params, timings=timings, debug_verify=verify)


def build_index(
    raw_text: Union[bytes, str],
    *,
    alphabet: AlphabetSpec = "infer",
    tau: Optional[int] = None,
    lambda_: Optional[int] = None,
    sampling: Optional[str] = None,
    sa_sample_rate: Optional[int] = None,
    c_d: Optional[int] = None,
    c_h: Optional[int] = None,
    micro_block: Optional[int] = None,
    verify: Optional[bool] = None,
    progress: bool = False,
) -> WildcardIndex:
    rate = DEFAULT_SA_SAMPLE_RATE if sa_sample_rate is None else sa_sample_rate
    started = time.perf_counter()
    text = build_text_index(raw_text, alphabet, sampling=rate)
    elapsed = time.perf_counter() - started
    params = IndexParams.resolve(
        text.n, text.alphabet.symbols,
        tau=tau, lambda_=lambda_, sampling=sampling, sa_sample_rate=rate,
        c_d=c_d, c_h=c_h, micro_block=micro_block,
    )
    index = assemble_index(text, params, verify=verify, progress=progress)
    index.timings = {"suffix_array": elapsed, **index.timings}
    return index


# ----------------------------
# Module-level operations
# ----------------------------
def unrooted_lcp_full(
    index: WildcardIndex, start: Union[int, Location], handle: PatternHandle, j: int,
    counters: QueryCounters | None = None,
) -> tuple[Location, int]:
    loc = Location(start) if isinstance(start, int) else start
    return index.unrooted_lcp(loc, handle, j, counters)


def wildcard_lcp(
    index: WildcardIndex, u: int, handle: PatternHandle, j: int, counters: QueryCounters | None = None
) -> list[WildcardHit]:
    return index.wildcard_lcp(u, handle, j, counters)


def wildcard_match_baseline(
    index: WildcardIndex, pattern: Union[WildcardPattern, str, bytes], counters: QueryCounters | None = None
) -> list[int]:
    return index.match_baseline(pattern, counters)


def wildcard_match_accelerated(
    index: WildcardIndex, pattern: Union[WildcardPattern, str, bytes], counters: QueryCounters | None = None
) -> list[int]:
    return index.match_accelerated(pattern, counters)


def report_occurrences(
    index: WildcardIndex, loci: Iterable[tuple[Location, bool]], length: int = 0
) -> list[int]:
    return index.report_occurrences(loci, length)
