import math

import numpy as np
import pytest

from tests.helpers import (
    A, B, N,
    LEAF_A, LEAF_ANA, LEAF_ANANA, LEAF_BANANA, LEAF_END, LEAF_NANA,
    NODE_A, NODE_ANA, NODE_NA, ROOT,
)
from wcindex.services.errors import ContractViolation
from wcindex.services.suffix_core import build_text_index
from wcindex.services.suffix_tree import (
    InducedTrie,
    Location,
    TrieLocation,
    build_suffix_tree,
    encode_group_topology,
    heavy_info,
    heavy_path_decompose,
    naive_descend,
    string_depth,
)


def test_banana_shape(banana_tree):
    t = banana_tree
    assert t.node_count == 11
    assert t.children[ROOT] == [LEAF_END, NODE_A, LEAF_BANANA, NODE_NA]
    assert t.children[NODE_A] == [LEAF_A, NODE_ANA]
    assert t.leaf_of_rank == [1, 3, 5, 6, 7, 9, 10]
    assert [string_depth(t, v) for v in (ROOT, NODE_A, NODE_ANA, NODE_NA)] == [0, 1, 3, 2]
    assert t.subtree_range(NODE_A) == range(2, 7)
    assert (t.lb[NODE_ANA], t.rb[NODE_ANA]) == (2, 3)


def test_locations(banana_tree):
    t = banana_tree
    assert t.make_location(NODE_A, NODE_ANA, 2) == Location(NODE_ANA)
    loc = t.make_location(NODE_ANA, LEAF_ANANA, 1)
    assert t.path_label(loc) == (A, N, A, N)
    assert t.location_at_depth(LEAF_ANANA, 4) == loc
    assert t.location_at_depth(LEAF_NANA, 2) == Location(NODE_NA)
    with pytest.raises(ContractViolation):
        t.make_location(ROOT, NODE_ANA, 1)


def test_naive_descend(banana_tree):
    t = banana_tree
    assert naive_descend(t, Location(ROOT), (A, N, A, N)) == (Location(NODE_ANA, LEAF_ANANA, 1), 4)
    assert naive_descend(t, Location(NODE_NA), ()) == (Location(NODE_NA), 0)
    assert naive_descend(t, Location(ROOT), (B, B)) == (Location(ROOT, LEAF_BANANA, 1), 1)


def test_steps_all_skips_the_sentinel(banana_tree):
    symbols = [a for a, _ in banana_tree.steps_all(Location(ROOT))]
    assert symbols == [A, B, N]
    assert banana_tree.step_down(Location(ROOT), 0) == Location(LEAF_END)


def test_heavy_path_banana(banana_tree):
    hp = banana_tree.heavy
    assert hp.paths[hp.path_of[ROOT]] == [ROOT, NODE_A, NODE_ANA, LEAF_ANA]
    assert hp.level_ancestor(LEAF_NANA, 3) == (NODE_NA, LEAF_NANA)
    assert hp.level_ancestor(LEAF_NANA, 2) == (NODE_NA, -1)


def test_heavy_path_crossings_bound():
    rng = np.random.default_rng(3)
    for _ in range(10):
        raw = bytes((97 + rng.integers(0, 3, size=int(rng.integers(5, 120)))).tolist())
        tree = build_suffix_tree(build_text_index(raw))
        limit = math.floor(math.log2(tree.index.n)) + 1
        assert max(tree.heavy.crossings(leaf) for leaf in tree.leaf_of_rank) <= limit


def test_heavy_path_with_membership(banana_tree):
    hp = heavy_path_decompose(banana_tree, NODE_A, lambda v: v != LEAF_ANA)
    assert hp.paths[hp.path_of[NODE_A]] == [NODE_A, LEAF_A]
    assert hp.paths[hp.path_of[NODE_ANA]] == [NODE_ANA, LEAF_ANANA]
    with pytest.raises(ContractViolation):
        heavy_path_decompose(banana_tree, NODE_A, lambda v: v != NODE_ANA)


def test_induced_trie_virtual_edges(banana_tree):
    trie = InducedTrie(banana_tree, [ROOT, LEAF_END, LEAF_ANA, LEAF_BANANA, LEAF_NANA])
    assert trie.parent0 == [-1, 0, 0, 0, 0]
    assert trie.depth0 == [0, 1, 4, 7, 5]
    assert set(trie.child_map0[0]) == {0, A, B, N}
    loc, matched = trie.naive_descend(0, (A, N, A, N))
    assert (loc, matched) == (TrieLocation(0, 2, 3), 3)
    assert trie.real_location(loc) == Location(NODE_ANA)
    assert not trie.is_consecutive()


def test_induced_trie_rejects_dangling_internal(banana_tree):
    with pytest.raises(ContractViolation):
        InducedTrie(banana_tree, [ROOT, NODE_A])


@pytest.mark.parametrize("micro_block", [1, 2, 3])
def test_topology_encoding_agrees_with_decomposition(micro_block):
    rng = np.random.default_rng(micro_block)
    raw = bytes((97 + rng.integers(0, 3, size=60)).tolist())
    tree = build_suffix_tree(build_text_index(raw))
    trie = InducedTrie(tree, range(tree.node_count))
    decomp = heavy_path_decompose(trie, trie.root)
    topo = encode_group_topology(trie, micro_block, decomposition=decomp)
    for v in range(trie.node_count):
        assert heavy_info(topo, v) == (decomp.head(v), decomp.terminal_leaf(v))


def test_topology_size_bound(banana_tree):
    trie = InducedTrie(banana_tree, range(banana_tree.node_count))
    with pytest.raises(ContractViolation):
        encode_group_topology(trie, 2, max_nodes=5)
