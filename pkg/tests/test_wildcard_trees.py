import numpy as np
import pytest

from tests.helpers import A, B, N, LEAF_ANA, LEAF_ANANA, LEAF_BANANA, LEAF_NANA, NODE_ANA, NODE_NA, ROOT
from wcindex.services.errors import ContractViolation, ParameterError
from wcindex.services.partition import build_partition
from wcindex.services.suffix_core import build_text_index, preprocess_pattern
from wcindex.services.suffix_tree import Location, build_suffix_tree
from wcindex.services.wildcard_trees import AlphabetGroups, build_wildcard_trees


@pytest.fixture(scope="module")
def banana_layer(banana_tree):
    partition = build_partition(banana_tree, 2)
    return build_wildcard_trees(partition, AlphabetGroups(3, 3), verify=True)


def test_alphabet_groups():
    groups = AlphabetGroups(5, 2)
    assert groups.count == 3
    assert groups.ranges == [(1, 2), (3, 4), (5, 5)]
    assert groups.group_of(5) == 2
    with pytest.raises(ContractViolation):
        groups.group_of(0)
    with pytest.raises(ParameterError):
        AlphabetGroups(5, 0)


def test_heavy_symbol_and_tree_shape(banana_layer):
    assert banana_layer.heavy_symbol == {ROOT: A}
    (tree,) = banana_layer.trees[ROOT]
    assert tree.symbols == (B, N)
    assert tree.trie.nodes == [ROOT, NODE_ANA, LEAF_ANA, LEAF_ANANA]
    assert tree.parent(1) == 0
    assert tree.depth(1) == 3
    assert banana_layer.leaf_count == 2
    assert banana_layer.leaf_count <= banana_layer.leaf_bound(4)


def test_pointers(banana_layer):
    (tree,) = banana_layer.trees[ROOT]
    # from "ana": b -> "bana", n -> "nana"
    assert tree.pointer(1, B).location == Location(ROOT, LEAF_BANANA, 4)
    assert tree.pointer(1, N).location == Location(NODE_NA, LEAF_NANA, 2)
    assert tree.pointer(1, A) is None
    assert tree.pointer(0, B).location == Location(ROOT, LEAF_BANANA, 1)
    assert tree.pointer(0, B).group == -1
    assert tree.pointer(0, N).group == 3
    assert tree.pointer(3, B).location == Location(LEAF_BANANA)


def test_search(banana_layer, banana_text):
    (tree,) = banana_layer.trees[ROOT]
    handle = preprocess_pattern(banana_text, (A, N, A, N))
    assert tree.search(handle, 0) == tree.trie.naive_descend(0, (A, N, A, N))
    assert tree.search(handle, 0)[1] == 4


def test_split_alphabet(banana_index):
    layer = banana_index.layer
    assert [t.symbols for t in layer.trees[ROOT]] == [(B,), (N,)]
    assert [t.leaf_count for t in layer.trees[ROOT]] == [1, 1]


@pytest.mark.parametrize("tau, lambda_", [(2, 1), (3, 2), (4, 4)])
def test_random_layers_verify_pointers(tau, lambda_):
    rng = np.random.default_rng(tau * 10 + lambda_)
    for _ in range(3):
        raw = bytes((97 + rng.integers(0, 4, size=int(rng.integers(10, 120)))).tolist())
        tree = build_suffix_tree(build_text_index(raw))
        partition = build_partition(tree, tau)
        layer = build_wildcard_trees(partition, AlphabetGroups(tree.index.sigma, lambda_), verify=True)
        assert set(layer.trees) == set(partition.marking.marked_internal)
        assert layer.leaf_count <= layer.leaf_bound(partition.marked_leaf_count)
        for u, trees in layer.trees.items():
            assert len(trees) == layer.groups.count
            for wt in trees:
                assert layer.heavy_symbol[u] not in wt.symbols
