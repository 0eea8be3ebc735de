import numpy as np
import pytest

from tests.helpers import (
    A, B, N, BANANA,
    LEAF_ANANA, LEAF_BANANA, LEAF_NANA, NODE_A, NODE_ANA, NODE_NA, ROOT,
)
from wcindex.services.errors import IndexRangeError, ParameterError
from wcindex.services.oracles import oracle_scan
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_tree import Location
from wcindex.services.wildcard_engine import (
    IndexParams,
    accelerated_budget,
    baseline_budget,
    build_index,
    report_occurrences,
    unrooted_lcp_full,
    wildcard_lcp,
    wildcard_match_accelerated,
    wildcard_match_baseline,
)
from wcindex.services.wildcard_pattern import WildcardPattern, parse_pattern

BANANA_MATCHES = [
    ("?a", [0, 2, 4]),
    ("a?a", [1, 3]),
    ("ana", [1, 3]),
    ("?ana", [0, 2]),
    ("", [0, 1, 2, 3, 4, 5]),
    ("?", [0, 1, 2, 3, 4, 5]),
    ("x?z", []),
    ("???????", []),
    ("??????", [0]),
    ("n?", [2, 4]),
    ("b?n", [0]),
    ("a?", [1, 3]),
]


def test_unrooted_lcp(banana_index):
    handle = banana_index.preprocess((A, N, A, N))
    assert unrooted_lcp_full(banana_index, ROOT, handle, 0) == (Location(NODE_ANA, LEAF_ANANA, 1), 4)
    assert unrooted_lcp_full(banana_index, NODE_NA, handle, 1) == (Location(NODE_NA, LEAF_NANA, 2), 2)
    assert unrooted_lcp_full(banana_index, ROOT, handle, 4) == (Location(ROOT), 0)
    with pytest.raises(IndexRangeError):
        unrooted_lcp_full(banana_index, ROOT, handle, 5)


def test_unrooted_lcp_from_mid_edge(banana_index):
    handle = banana_index.preprocess((A, N, A, N, A))
    start = Location(ROOT, LEAF_BANANA, 1)
    assert unrooted_lcp_full(banana_index, start, handle, 0) == (Location(ROOT, LEAF_BANANA, 6), 5)


def test_unrooted_lcp_counts_calls(banana_index):
    counters = QueryCounters()
    unrooted_lcp_full(banana_index, ROOT, banana_index.preprocess((N, A)), 0, counters)
    assert counters.unrooted_full_calls == 1
    assert counters.group_queries >= 1


def test_wildcard_lcp_at_marked_root(banana_index):
    handle = banana_index.preprocess((A, N, A))
    hits = {h.symbol: h for h in wildcard_lcp(banana_index, ROOT, handle, 0)}
    assert set(hits) == {A, B, N}
    assert (hits[B].location, hits[B].matched, hits[B].full) == (Location(ROOT, LEAF_BANANA, 4), 4, True)
    assert (hits[N].location, hits[N].matched, hits[N].full) == (Location(NODE_NA, LEAF_NANA, 2), 4, True)
    assert (hits[A].location, hits[A].matched, hits[A].full) == (Location(NODE_A), 1, False)


def test_wildcard_lcp_at_unmarked_node(banana_index):
    hits = wildcard_lcp(banana_index, NODE_A, banana_index.preprocess((N,)), 0)
    assert [(h.symbol, h.location, h.full) for h in hits] == [(N, Location(NODE_A, NODE_ANA, 1), False)]
    assert wildcard_lcp(banana_index, LEAF_BANANA, banana_index.preprocess((N,)), 0) == []


@pytest.mark.parametrize("pattern, expected", BANANA_MATCHES)
def test_banana_matches_both_engines(banana_index, pattern, expected):
    assert wildcard_match_baseline(banana_index, pattern) == expected
    assert wildcard_match_accelerated(banana_index, pattern) == expected
    assert oracle_scan(BANANA, pattern) == expected


@pytest.mark.parametrize("pattern, expected", BANANA_MATCHES)
def test_banana_matches_every_sampling_level(banana_index_any_level, pattern, expected):
    assert banana_index_any_level.match(pattern) == expected


def test_query_counts(banana_index):
    counters = QueryCounters()
    banana_index.match_accelerated("?a", counters)
    assert (counters.standard_lcp, counters.wildcard_lcp) == (0, 1)

    counters = QueryCounters()
    banana_index.match_baseline("?a", counters)
    assert counters.standard_lcp == 3
    assert counters.standard_lcp <= baseline_budget(parse_pattern("?a"), 3)

    counters = QueryCounters()
    banana_index.match_accelerated("a?a", counters)
    assert (counters.standard_lcp, counters.wildcard_lcp) == (1, 1)

    counters = QueryCounters()
    banana_index.match_baseline("a?a", counters)
    assert counters.standard_lcp == 2


def test_budgets():
    assert baseline_budget(parse_pattern("a?a"), 3) == 5
    assert baseline_budget(parse_pattern("?a"), 3) == 4
    assert baseline_budget(parse_pattern("a?{2}b?"), 2) == 6
    assert accelerated_budget(parse_pattern("?a"), 3) == 3
    assert accelerated_budget(parse_pattern("a?b?c"), 1) == 3
    assert accelerated_budget(parse_pattern("abc"), 4) == 1


def test_report_occurrences(banana_index):
    assert report_occurrences(banana_index, [(Location(NODE_ANA), True)], 3) == [1, 3]
    assert report_occurrences(banana_index, [(Location(NODE_ANA), False)], 3) == []
    assert report_occurrences(banana_index, [(Location(ROOT), True)]) == [0, 1, 2, 3, 4, 5]


def test_unknown_engine(banana_index):
    with pytest.raises(ParameterError):
        banana_index.match("a", engine="fast")


def test_index_params():
    params = IndexParams.resolve(100, b"ab", tau=4, lambda_=2, sampling="compact",
                                 sa_sample_rate=2, c_d=3, c_h=3, micro_block=2)
    assert params.alphabet == (97, 98)
    assert IndexParams.from_dict(params.as_dict()) == params
    with pytest.raises(ParameterError):
        IndexParams.resolve(100, b"ab", tau=1)
    with pytest.raises(ParameterError):
        IndexParams.resolve(100, b"ab", lambda_=0)
    with pytest.raises(ParameterError):
        IndexParams.resolve(100, b"ab", sampling="dense")


def test_build_records_timings(banana_index):
    assert {"suffix_array", "suffix_tree", "partition", "wildcard_trees"} <= set(banana_index.timings)
    assert banana_index.params.tau == 2


def _random_pattern(rng, alphabet):
    pieces = []
    for _ in range(int(rng.integers(1, 4))):
        k = int(rng.integers(0, 3))
        literal = bytes(rng.choice(alphabet, size=int(rng.integers(0, 3))).tolist())
        pieces.append((k, literal))
    return WildcardPattern.from_pieces(pieces)


@pytest.mark.parametrize("tau, lambda_, sampling", [
    (2, 1, "full"), (2, 2, "compact"), (3, 2, "sampled"), (4, 3, "full"), (8, 2, "sampled"),
])
def test_random_texts_against_scan(tau, lambda_, sampling):
    rng = np.random.default_rng(tau * 100 + lambda_)
    for sigma in (1, 2, 3):
        alphabet = list(b"acgt"[:sigma])
        raw = bytes(rng.choice(alphabet, size=int(rng.integers(5, 90))).tolist())
        idx = build_index(raw, tau=tau, lambda_=lambda_, sampling=sampling, c_d=2, c_h=2, micro_block=2)
        for _ in range(12):
            pattern = _random_pattern(rng, alphabet)
            expected = oracle_scan(raw, pattern)
            fast, base = QueryCounters(), QueryCounters()
            assert idx.match_accelerated(pattern, fast) == expected, pattern.to_text()
            assert idx.match_baseline(pattern, base) == expected, pattern.to_text()
            assert base.standard_lcp <= baseline_budget(pattern, idx.sigma)
            assert fast.standard_lcp + fast.wildcard_lcp <= accelerated_budget(pattern, idx.sigma)
