# wcindex/services/partition.py

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from wcindex.services.errors import ContractViolation, ParameterError
from wcindex.services.group_lcp import GroupLcpStructure, SamplingLevel, check_sampling_level
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_core import PatternHandle
from wcindex.services.suffix_tree import (
    InducedTrie,
    Location,
    SuffixTree,
    TrieLocation,
    child_runs,
    mark_nodes_generic,
)

logger = logging.getLogger(__name__)


@dataclass
class GroupHalf:
    """One queryable subtree of a group: the whole group, or its left/right side."""

    side: str                    # "all", "left" or "right"
    trie: InducedTrie
    lcp: GroupLcpStructure
    cut: frozenset[int]          # local ids at or below the marked bottom

    def contains(self, node: int) -> bool:
        return node in self.trie.local_of


@dataclass
class Group:
    gid: int
    kind: str                    # "single" (bottom is a marked leaf) or "pair"
    top: int                     # marked node the group hangs from
    bottom: int                  # the one marked node directly below the top
    members: list[int]           # nodes owned by this group (top excluded)
    left_members: list[int] = field(default_factory=list)    # path plus everything left of it
    right_members: list[int] = field(default_factory=list)
    halves: list[GroupHalf] = field(default_factory=list)

    @property
    def node_count(self) -> int:
        return len(self.members) + 1


@dataclass(frozen=True)
class GroupAnswer:
    """A group query outcome: a final location, or a marked node to continue from."""

    location: Optional[Location]
    matched: int
    resume_at: int = -1


class RankBitvector:
    """Plain bitvector with precomputed prefix counts."""

    def __init__(self, bits: np.ndarray):
        self.bits = np.asarray(bits, dtype=bool)
        self._prefix = np.zeros(len(self.bits) + 1, dtype=np.int64)
        np.cumsum(self.bits, out=self._prefix[1:])

    def __len__(self) -> int:
        return len(self.bits)

    def rank1(self, i: int) -> int:
        """Number of ones in bits[0:i]."""
        if not 0 <= i <= len(self.bits):
            raise ContractViolation(f"rank position {i} outside 0..{len(self.bits)}")
        return int(self._prefix[i])

    @property
    def ones(self) -> int:
        return int(self._prefix[-1])

    def packed(self) -> bytes:
        return np.packbits(self.bits).tobytes()


@dataclass(frozen=True)
class Marking:
    tau: int
    marked: list[bool]
    has_marked: list[bool]       # node or some descendant marked
    marked_leaves: list[int]
    marked_internal: list[int]


def mark_nodes(tree: SuffixTree, tau: int) -> Marking:
    """Every tau-th leaf from the leftmost, every node with two children holding marks, and the root."""
    if tau < 2:
        raise ParameterError(f"tau must be >= 2, got {tau}")
    marked, has = mark_nodes_generic(tree, tree.leaf_of_rank, tau)
    leaves = [v for v in range(tree.node_count) if marked[v] and tree.is_leaf(v)]
    internal = [v for v in range(tree.node_count) if marked[v] and not tree.is_leaf(v)]
    return Marking(tau=tau, marked=marked, has_marked=has, marked_leaves=leaves, marked_internal=internal)


def _chain_to_marked(tree: SuffixTree, start: int, marking: Marking) -> list[int]:
    """Nodes from `start` down to the first marked node, following the only child holding marks."""
    chain = [start]
    v = start
    while not marking.marked[v]:
        hits = [c for c in tree.children[v] if marking.has_marked[c]]
        if len(hits) != 1:
            raise ContractViolation(f"node {v} should have exactly one child holding marks")
        v = hits[0]
        chain.append(v)
    return chain


def _subtree_nodes(tree: SuffixTree, roots: list[int]) -> list[int]:
    out: list[int] = []
    for r in roots:
        out.extend(tree.subtree_range(r))
    return out


def build_groups(tree: SuffixTree, marking: Marking) -> list[Group]:
    """
    For every marked internal node u, cut u's children into runs holding one
    child with marks. A run whose chain ends in a marked leaf forms a single
    group; one ending in a marked internal node v forms the pair G(u, v),
    owning everything in the run except the proper descendants of v.
    """
    groups: list[Group] = []
    for u in marking.marked_internal:
        kids = tree.children[u]
        for start, stop, hit in child_runs(kids, marking.has_marked):
            chain = _chain_to_marked(tree, kids[hit], marking)
            bottom = chain[-1]
            if tree.is_leaf(bottom):
                members = _subtree_nodes(tree, kids[start:stop])
                groups.append(Group(len(groups), "single", u, bottom, members))
                continue
            on_path = set(chain)
            left: list[int] = _subtree_nodes(tree, kids[start:hit])
            right: list[int] = _subtree_nodes(tree, kids[hit + 1:stop])
            for w, nxt in zip(chain, chain[1:]):
                siblings = tree.children[w]
                k = siblings.index(nxt)
                left.extend(_subtree_nodes(tree, siblings[:k]))
                right.extend(_subtree_nodes(tree, siblings[k + 1:]))
            members = sorted(on_path.union(left, right))
            groups.append(Group(
                len(groups), "pair", u, bottom, members,
                left_members=sorted(on_path.union(left)),
                right_members=sorted(on_path.union(right)),
            ))
    return groups


@dataclass
class PartitionIndex:
    tree: SuffixTree
    marking: Marking
    groups: list[Group]
    owner: np.ndarray                     # node -> group id owning it (-1 for the root)
    B: RankBitvector
    A_m: np.ndarray                       # marked ordinal -> marked-tree node
    tm: InducedTrie
    tm_lcp: GroupLcpStructure
    routers: dict[int, tuple[list[int], list[int]]]   # marked node -> (first symbols, group ids)
    level: str = "full"

    @property
    def tau(self) -> int:
        return self.marking.tau

    @property
    def marked_leaf_count(self) -> int:
        return len(self.marking.marked_leaves)

    @property
    def marked_internal_count(self) -> int:
        return len(self.marking.marked_internal)

    def is_marked(self, v: int) -> bool:
        return self.marking.marked[v]

    # ----------------------------
    # Marked tree navigation
    # ----------------------------
    def rank1(self, i: int) -> int:
        return self.B.rank1(i)

    def marked_to_tm(self, u: int) -> int:
        if not self.marking.marked[u]:
            raise ContractViolation(f"node {u} is not marked")
        return int(self.A_m[self.B.rank1(u)])

    def tm_to_marked(self, node: int) -> int:
        return self.tm.real(node)

    def route_child(self, u: int, symbol: int) -> Optional[Group]:
        """The group under marked u whose first-symbol range covers `symbol`."""
        keys, gids = self.routers.get(u, ([], []))
        i = bisect_right(keys, symbol) - 1
        if i < 0:
            return None
        return self.groups[gids[i]]

    def unrooted_lcp_marked(
        self, node: int, handle: PatternHandle, j: int, counters: QueryCounters | None = None
    ) -> tuple[TrieLocation, int]:
        return self.tm_lcp.query(node, handle, j, counters)

    # ----------------------------
    # Group queries
    # ----------------------------
    def group_of(self, v: int) -> Group:
        gid = int(self.owner[v])
        if gid < 0:
            raise ContractViolation(f"node {v} is not owned by any group")
        return self.groups[gid]

    def query_group(
        self, group: Group, start: int, handle: PatternHandle, j: int,
        counters: QueryCounters | None = None,
    ) -> GroupAnswer:
        """
        Unrooted LCP from `start` inside one group. Pair groups are asked on
        every half holding `start` and the deeper answer wins; reaching the
        marked bottom hands the rest of the query back to the caller.
        """
        best: Optional[tuple[int, GroupHalf, TrieLocation]] = None
        for half in group.halves:
            local = half.trie.local_of.get(start)
            if local is None:
                continue
            loc, matched = half.lcp.query(local, handle, j, counters)
            if best is None or matched > best[0]:
                best = (matched, half, loc)
        if best is None:
            raise ContractViolation(f"node {start} is not in group {group.gid}")
        matched, half, loc = best
        if loc.upper in half.cut:
            depth = self.tree.depth
            return GroupAnswer(None, depth[group.bottom] - depth[start], group.bottom)
        return GroupAnswer(half.trie.real_location(loc), matched)


def _make_half(
    tree: SuffixTree, side: str, members: list[int], extra_leaf: int, bottom: int,
    level: SamplingLevel, c_d: int, c_h: int, micro_block: int,
) -> GroupHalf:
    nodes = list(members)
    if extra_leaf >= 0:
        nodes.append(extra_leaf)
    trie = InducedTrie(tree, nodes)
    lcp = GroupLcpStructure(trie, tree.index, level=level, c_d=c_d, c_h=c_h, micro_block=micro_block)
    cut: set[int] = set()
    if extra_leaf >= 0:
        cut = {trie.local_of[bottom], trie.local_of[extra_leaf]}
    return GroupHalf(side=side, trie=trie, lcp=lcp, cut=frozenset(cut))


def build_marked_tree_lcp(tree: SuffixTree, marking: Marking) -> tuple[InducedTrie, GroupLcpStructure]:
    """Marked tree over the marked leaves' suffixes with its unrooted LCP structure."""
    members = [v for v in range(tree.node_count) if marking.marked[v]]
    tm = InducedTrie(tree, members)
    return tm, GroupLcpStructure(tm, tree.index, level="full", require_consecutive=False)


def build_partition(
    tree: SuffixTree,
    tau: int,
    *,
    level: SamplingLevel = "full",
    c_d: int = 2,
    c_h: int = 2,
    micro_block: int = 2,
) -> PartitionIndex:
    check_sampling_level(level)
    marking = mark_nodes(tree, tau)
    if len(marking.marked_internal) > len(marking.marked_leaves):
        raise ContractViolation("more marked internal nodes than marked leaves")
    groups = build_groups(tree, marking)

    owner = np.full(tree.node_count, -1, dtype=np.int64)
    for group in groups:
        for v in group.members:
            if owner[v] >= 0:
                raise ContractViolation(f"node {v} owned by groups {owner[v]} and {group.gid}")
            owner[v] = group.gid
        if group.kind == "single":
            group.halves = [_make_half(tree, "all", [group.top] + group.members, -1, group.bottom,
                                       level, c_d, c_h, micro_block)]
        else:
            v = group.bottom
            left_leaf = tree.leaf_of_rank[tree.lb[v]]
            right_leaf = tree.leaf_of_rank[tree.rb[v]]
            group.halves = [
                _make_half(tree, "left", [group.top] + group.left_members, left_leaf, v,
                           level, c_d, c_h, micro_block),
                _make_half(tree, "right", [group.top] + group.right_members, right_leaf, v,
                           level, c_d, c_h, micro_block),
            ]
        if group.node_count > 4 * tau:
            raise ContractViolation(f"group {group.gid} has {group.node_count} nodes, bound is {4 * tau}")
    unowned = np.flatnonzero(owner[1:] < 0)
    if unowned.size:
        raise ContractViolation(f"node {int(unowned[0]) + 1} belongs to no group")

    B = RankBitvector(np.asarray(marking.marked, dtype=bool))
    tm, tm_lcp = build_marked_tree_lcp(tree, marking)
    A_m = np.asarray([tm.local_of[v] for v in tm.nodes], dtype=np.int64)

    routers: dict[int, tuple[list[int], list[int]]] = {}
    for group in groups:
        keys, gids = routers.setdefault(group.top, ([], []))
        first_child = min(v for v in group.members if tree.parent[v] == group.top)
        keys.append(tree.first_symbol(first_child))
        gids.append(group.gid)

    logger.info(
        "partition tau=%d: %d marked leaves, %d marked internal, %d groups, marked tree %d nodes",
        tau, len(marking.marked_leaves), len(marking.marked_internal), len(groups), tm.node_count,
    )
    return PartitionIndex(
        tree=tree,
        marking=marking,
        groups=groups,
        owner=owner,
        B=B,
        A_m=A_m,
        tm=tm,
        tm_lcp=tm_lcp,
        routers=routers,
        level=level,
    )
