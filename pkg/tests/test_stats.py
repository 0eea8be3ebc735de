from wcindex.services.stats import QueryCounters, build_stats_report, mean_counters


def test_structure_counts(banana_index):
    report = build_stats_report(banana_index)
    s = report.structures
    assert (s.n, s.sigma, s.tau, s.lambda_) == (7, 3, 2, 2)
    assert (s.tree_nodes, s.marked_leaves, s.marked_internal, s.groups) == (11, 4, 1, 4)
    assert s.max_group_nodes == 6
    assert s.tm_nodes == 5
    assert s.wildcard_tree_leaves == 2
    assert s.b_bits == 11
    assert report.auxiliary_bits == sum(report.bits.values())


def test_report_lines_and_frame(banana_index):
    counters = QueryCounters(standard_lcp=2)
    report = build_stats_report(banana_index, counters, {"queries": 0.5})
    lines = report.to_lines()
    assert lines[0] == "structure.n=7"
    assert "counter.standard_lcp=2" in lines
    assert "time.queries=0.5" in lines
    frame = report.to_frame()
    assert list(frame.columns) == ["key", "value"]
    assert len(frame) == len(lines)


def test_counters_merge():
    a = QueryCounters(standard_lcp=1, max_lookup_materializations=4)
    a.merge(QueryCounters(standard_lcp=2, max_lookup_materializations=3))
    assert a.standard_lcp == 3
    assert a.max_lookup_materializations == 4


def test_mean_counters():
    assert mean_counters([]) == {}
    means = mean_counters([QueryCounters(wildcard_lcp=1), QueryCounters(wildcard_lcp=3)])
    assert means["wildcard_lcp"] == 2.0
