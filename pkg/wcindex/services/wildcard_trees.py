# wcindex/services/wildcard_trees.py

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from tqdm import tqdm

from wcindex.services.errors import ContractViolation, ParameterError
from wcindex.services.group_lcp import GroupLcpStructure
from wcindex.services.partition import PartitionIndex
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_core import SENTINEL, PatternHandle
from wcindex.services.suffix_tree import InducedTrie, Location, SuffixTree, TrieLocation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphabetGroups:
    """Symbols 1..sigma cut into contiguous ranges of lambda_ symbols (the last may be shorter)."""

    sigma: int
    lambda_: int

    def __post_init__(self):
        if self.lambda_ < 1:
            raise ParameterError(f"lambda must be >= 1, got {self.lambda_}")

    @property
    def count(self) -> int:
        return max(1, math.ceil(self.sigma / self.lambda_))

    @property
    def ranges(self) -> list[tuple[int, int]]:
        """Inclusive (first, last) symbol per group."""
        return [
            (1 + i * self.lambda_, min(self.sigma, (i + 1) * self.lambda_))
            for i in range(self.count)
        ]

    def group_of(self, symbol: int) -> int:
        if not 1 <= symbol <= self.sigma:
            raise ContractViolation(f"symbol {symbol} outside 1..{self.sigma}")
        return (symbol - 1) // self.lambda_


@dataclass(frozen=True)
class WildcardPointer:
    location: Location
    group: int                   # group owning the target's lower node, -1 when that node is marked


@dataclass
class WildcardTree:
    """
    Compressed trie of the strings s with a.s = str(owner, leaf) over the
    owner's marked light leaves whose first symbol a lies in one alphabet
    range. Node v with label s points, per symbol a, at str(owner).a.s.
    """

    owner: int
    alphabet_group: int
    symbols: tuple[int, ...]                 # symbols answered through this tree
    trie: Optional[InducedTrie]
    lcp: Optional[GroupLcpStructure]
    pointers: list[dict[int, WildcardPointer]] = field(default_factory=list)

    @property
    def node_count(self) -> int:
        return self.trie.node_count if self.trie is not None else 1

    @property
    def leaf_count(self) -> int:
        return len(self.trie.leaves) if self.trie is not None else 0

    @property
    def pointer_count(self) -> int:
        return sum(len(p) for p in self.pointers)

    def pointer(self, node: int, symbol: int) -> Optional[WildcardPointer]:
        return self.pointers[node].get(symbol)

    def parent(self, node: int) -> int:
        return self.trie.parent0[node] if self.trie is not None else -1

    def depth(self, node: int) -> int:
        return self.trie.depth0[node] if self.trie is not None else 0

    def search(
        self, handle: PatternHandle, j: int, counters: QueryCounters | None = None
    ) -> tuple[TrieLocation, int]:
        if self.lcp is None:
            return TrieLocation(0), 0
        return self.lcp.query(0, handle, j, counters)


@dataclass
class WildcardLayer:
    groups: AlphabetGroups
    trees: dict[int, list[WildcardTree]]     # marked internal node -> one tree per alphabet range
    heavy_symbol: dict[int, int]             # marked internal node -> first symbol of its heavy edge

    @property
    def node_count(self) -> int:
        return sum(t.node_count for ts in self.trees.values() for t in ts)

    @property
    def leaf_count(self) -> int:
        return sum(t.leaf_count for ts in self.trees.values() for t in ts)

    @property
    def pointer_count(self) -> int:
        return sum(t.pointer_count for ts in self.trees.values() for t in ts)

    def leaf_bound(self, marked_leaves: int) -> int:
        return marked_leaves * (math.floor(math.log2(max(1, marked_leaves))) + 1)


def _suffix_trie(tree: SuffixTree, positions: list[int]) -> InducedTrie:
    """Compressed trie of the text suffixes starting at `positions`, as an induced subtree."""
    index = tree.index
    ranks = sorted(index.isa_lookup(p) for p in positions)
    members = {tree.root}
    members.update(tree.leaf_of_rank[r] for r in ranks)
    for r1, r2 in zip(ranks, ranks[1:]):
        fork = tree.location_at_depth(tree.leaf_of_rank[r2], index.lcp_suffixes(r1, r2))
        if not fork.is_node:
            raise ContractViolation(f"suffix ranks {r1}, {r2} fork inside an edge")
        members.add(fork.upper)
    return InducedTrie(tree, members)


def _heavy_edge(partition: PartitionIndex, u: int) -> tuple[int, int]:
    """
    (marked-tree child, first symbol) of u's heavy edge: most marked leaves,
    then most leaves overall, then smallest symbol.
    """
    tree = partition.tree
    tm = partition.tm
    u_m = partition.marked_to_tm(u)
    best, best_key, best_symbol = -1, None, -1
    for c in tm.children0[u_m]:
        symbol = tree.index.symbol_at(tm.any_leaf_position(c) + tree.depth[u])
        real_child = tree.child_map[u][symbol]
        key = (tm.last_leaf[c] - tm.first_leaf[c] + 1, tree.leaf_count(real_child))
        if best_key is None or key > best_key:
            best, best_key, best_symbol = c, key, symbol
    return best, best_symbol


def _shifted_interval(tree: SuffixTree, child: int, shift: int, lo_rank: int, hi_rank: int) -> tuple[int, int]:
    """Ranks r under `child` whose suffix, `shift` symbols later, has rank in [lo_rank, hi_rank]."""
    index = tree.index
    lo, hi = tree.lb[child], tree.rb[child] + 1
    a, b = lo, hi
    while a < b:
        mid = (a + b) // 2
        if index.psi(mid, shift) < lo_rank:
            a = mid + 1
        else:
            b = mid
    first = a
    a, b = first, hi
    while a < b:
        mid = (a + b) // 2
        if index.psi(mid, shift) <= hi_rank:
            a = mid + 1
        else:
            b = mid
    return first, a - 1


def _build_pointers(
    partition: PartitionIndex, u: int, trie: Optional[InducedTrie], symbols: tuple[int, ...],
    verify: bool,
) -> list[dict[int, WildcardPointer]]:
    tree = partition.tree
    shift = tree.depth[u] + 1
    owner_label = tree.path_label(Location(u)) if verify else ()
    nodes = trie.nodes if trie is not None else [tree.root]
    out: list[dict[int, WildcardPointer]] = []
    for local, real in enumerate(nodes):
        label_depth = tree.depth[real]
        lo_rank, hi_rank = tree.lb[real], tree.rb[real]
        table: dict[int, WildcardPointer] = {}
        for a in symbols:
            child = tree.child_map[u][a]
            first, last = _shifted_interval(tree, child, shift, lo_rank, hi_rank)
            if first > last:
                continue
            loc = tree.location_at_depth(tree.leaf_of_rank[first], shift + label_depth)
            lower = loc.lower
            group = -1 if partition.is_marked(lower) else int(partition.owner[lower])
            if verify:
                start = tree.any_leaf_position(real)
                expected = owner_label + (a,) + tree.index.segment(start, start + label_depth)
                if tree.path_label(loc) != expected:
                    raise ContractViolation(f"wildcard pointer from node {u} symbol {a} lands on the wrong string")
            table[a] = WildcardPointer(loc, group)
        out.append(table)
    return out


def build_wildcard_trees(
    partition: PartitionIndex,
    alphabet_groups: Optional[AlphabetGroups] = None,
    *,
    verify: bool = False,
    progress: bool = False,
) -> WildcardLayer:
    tree = partition.tree
    index = tree.index
    groups = alphabet_groups or AlphabetGroups(index.sigma, max(1, index.sigma))
    tm = partition.tm
    trees: dict[int, list[WildcardTree]] = {}
    heavy_symbol: dict[int, int] = {}

    nodes = partition.marking.marked_internal
    for u in tqdm(nodes, desc="wildcard trees", disable=not progress):
        u_m = partition.marked_to_tm(u)
        heavy_m, a_h = _heavy_edge(partition, u)
        heavy_symbol[u] = a_h
        skip = range(tm.first_leaf[heavy_m], tm.last_leaf[heavy_m] + 1)

        buckets: list[list[int]] = [[] for _ in range(groups.count)]
        for i in range(tm.first_leaf[u_m], tm.last_leaf[u_m] + 1):
            if i in skip:
                continue
            position = tm.leaf_position(tm.leaves[i]) + tree.depth[u]
            a = index.symbol_at(position)
            if a == SENTINEL:
                continue
            buckets[groups.group_of(a)].append(position + 1)

        per_group = []
        for gi, (first, last) in enumerate(groups.ranges):
            symbols = tuple(
                a for a in range(first, last + 1)
                if a != a_h and a in tree.child_map[u]
            )
            trie = _suffix_trie(tree, buckets[gi]) if buckets[gi] else None
            lcp = (
                GroupLcpStructure(trie, index, level="full", require_consecutive=False)
                if trie is not None else None
            )
            per_group.append(WildcardTree(
                owner=u,
                alphabet_group=gi,
                symbols=symbols,
                trie=trie,
                lcp=lcp,
                pointers=_build_pointers(partition, u, trie, symbols, verify),
            ))
        trees[u] = per_group

    layer = WildcardLayer(groups=groups, trees=trees, heavy_symbol=heavy_symbol)
    bound = layer.leaf_bound(partition.marked_leaf_count)
    if layer.leaf_count > bound:
        raise ContractViolation(f"wildcard trees hold {layer.leaf_count} leaves, bound is {bound}")
    logger.info(
        "wildcard layer: %d trees, %d nodes, %d leaves, %d pointers",
        sum(len(t) for t in trees.values()), layer.node_count, layer.leaf_count, layer.pointer_count,
    )
    return layer
