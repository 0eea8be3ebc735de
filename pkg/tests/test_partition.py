import numpy as np
import pytest

from tests.helpers import (
    A, B, N,
    LEAF_A, LEAF_ANA, LEAF_ANANA, LEAF_BANANA, LEAF_END, LEAF_NANA,
    NODE_A, NODE_ANA, NODE_NA, ROOT,
)
from wcindex.services.errors import ContractViolation, ParameterError
from wcindex.services.partition import RankBitvector, build_partition, mark_nodes
from wcindex.services.suffix_core import build_text_index, preprocess_pattern
from wcindex.services.suffix_tree import Location, TrieLocation, build_suffix_tree, naive_descend


@pytest.fixture(scope="module")
def banana_partition(banana_tree):
    return build_partition(banana_tree, 2)


def test_marking(banana_tree):
    marking = mark_nodes(banana_tree, 2)
    assert marking.marked_leaves == [LEAF_END, LEAF_ANA, LEAF_BANANA, LEAF_NANA]
    assert marking.marked_internal == [ROOT]
    with pytest.raises(ParameterError):
        mark_nodes(banana_tree, 1)


def test_groups(banana_partition):
    p = banana_partition
    assert [g.kind for g in p.groups] == ["single"] * 4
    assert [g.members for g in p.groups] == [[1], [2, 3, 4, 5, 6], [7], [8, 9, 10]]
    assert p.group_of(NODE_ANA).gid == 1
    assert p.owner[ROOT] == -1
    with pytest.raises(ContractViolation):
        p.group_of(ROOT)


def test_marked_tree_mapping(banana_partition):
    p = banana_partition
    assert p.rank1(LEAF_NANA) == 4
    assert [p.marked_to_tm(v) for v in (ROOT, LEAF_END, LEAF_ANA, LEAF_BANANA, LEAF_NANA)] == [0, 1, 2, 3, 4]
    assert all(p.tm_to_marked(p.marked_to_tm(v)) == v for v in p.marking.marked_internal + p.marking.marked_leaves)
    assert p.is_marked(LEAF_ANA) and not p.is_marked(NODE_A)
    with pytest.raises(ContractViolation):
        p.marked_to_tm(NODE_NA)


def test_route_child(banana_partition):
    p = banana_partition
    assert p.routers[ROOT][0] == [0, A, B, N]
    assert p.route_child(ROOT, A).gid == 1
    assert p.route_child(ROOT, N).gid == 3
    assert p.route_child(ROOT, -1) is None
    assert p.route_child(NODE_A, A) is None


def test_unrooted_lcp_on_marked_tree(banana_partition, banana_text):
    handle = preprocess_pattern(banana_text, (N, A, N, A, 0))
    assert banana_partition.unrooted_lcp_marked(0, handle, 0) == (TrieLocation(4), 5)


def test_query_group(banana_partition, banana_text):
    p = banana_partition
    handle = preprocess_pattern(banana_text, (N, A, N))
    answer = p.query_group(p.group_of(NODE_A), NODE_A, handle, 0)
    assert answer.location == Location(NODE_ANA, LEAF_ANANA, 1)
    assert answer.matched == 3
    assert answer.resume_at == -1
    with pytest.raises(ContractViolation):
        p.query_group(p.group_of(NODE_A), NODE_NA, handle, 0)
    assert p.query_group(p.group_of(LEAF_A), LEAF_A, handle, 0).location == Location(LEAF_A)


def test_large_tau_gives_one_group(banana_tree):
    p = build_partition(banana_tree, 100)
    assert p.marking.marked_leaves == [LEAF_END]
    assert len(p.groups) == 1
    assert p.groups[0].members == list(range(1, 11))


def test_rank_bitvector():
    bv = RankBitvector(np.array([1, 0, 1, 1, 0], dtype=bool))
    assert [bv.rank1(i) for i in range(6)] == [0, 1, 1, 2, 3, 3]
    assert bv.ones == 3
    assert bv.packed() == bytes([0b10110000])
    with pytest.raises(ContractViolation):
        bv.rank1(6)


def _random_tree(rng, sigma):
    raw = bytes((97 + rng.integers(0, sigma, size=int(rng.integers(10, 150)))).tolist())
    return build_suffix_tree(build_text_index(raw))


@pytest.mark.parametrize("tau", [2, 3, 5, 8])
def test_random_partitions(tau):
    rng = np.random.default_rng(tau)
    for _ in range(4):
        tree = _random_tree(rng, int(rng.integers(2, 5)))
        p = build_partition(tree, tau)
        assert p.marked_internal_count <= p.marked_leaf_count
        assert all(g.node_count <= 4 * tau for g in p.groups)
        assert sorted(v for g in p.groups for v in g.members) == list(range(1, tree.node_count))
        for u in p.marking.marked_internal:
            for child in tree.children[u]:
                assert p.route_child(u, tree.first_symbol(child)) is p.group_of(child)


@pytest.mark.parametrize("level", ["full", "compact", "sampled"])
def test_group_queries_against_naive(level):
    rng = np.random.default_rng(17)
    for _ in range(3):
        tree = _random_tree(rng, 2)
        text = tree.index
        p = build_partition(tree, 3, level=level)
        for _ in range(40):
            start = int(rng.integers(1, tree.node_count))
            offset = int(rng.integers(0, text.n - 1))
            pattern = tuple(int(x) for x in text.segment(offset, min(offset + 6, text.n - 1)))
            handle = preprocess_pattern(text, pattern)
            group = p.group_of(start)
            answer = p.query_group(group, start, handle, 0)
            loc, matched = naive_descend(tree, Location(start), pattern)
            if answer.resume_at < 0:
                assert (answer.location, answer.matched) == (loc, matched)
            else:
                assert answer.resume_at == group.bottom
                assert loc.lower in tree.subtree_range(group.bottom)
                assert answer.matched == tree.depth[group.bottom] - tree.depth[start]
