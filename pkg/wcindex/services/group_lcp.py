# wcindex/services/group_lcp.py

from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from wcindex.services.errors import ContractViolation, ParameterError
from wcindex.services.stats import QueryCounters
from wcindex.services.suffix_core import PatternHandle, TextIndex
from wcindex.services.suffix_tree import (
    GroupTopology,
    InducedTrie,
    TrieLocation,
    encode_group_topology,
    heavy_info,
    heavy_path_decompose,
)

logger = logging.getLogger(__name__)

SamplingLevel = Literal["full", "compact", "sampled"]
SAMPLING_LEVELS: tuple[str, ...] = ("full", "compact", "sampled")


@dataclass(frozen=True)
class SetHit:
    rank: int   # global rank of the element's suffix
    leaf: int   # local trie leaf the element comes from


@dataclass(frozen=True)
class _RankSet:
    parent: int                 # local id whose depth shifts every element
    leaves: tuple[int, ...]     # local leaf ids, sorted order of their suffixes
    keys: np.ndarray            # stored ranks (all of them, every c-th, or none)
    step: int                   # 1 when every key is kept


def check_sampling_level(level: str) -> SamplingLevel:
    if level not in SAMPLING_LEVELS:
        raise ParameterError(f"unknown sampling level {level!r}; expected one of {SAMPLING_LEVELS}")
    return level  # type: ignore[return-value]


class GroupLcpStructure:
    """
    Unrooted LCP queries inside an induced subtree.

    A query from u probes the heavy path of u with one suffix comparison,
    finds the deepest path node within reach, steps into the off-path child
    named by the next pattern symbol, and settles the rest with one
    predecessor/successor lookup among that child's suffixes.

    Sampling levels:
      full     all ranks and all path depths stored
      compact  same search keys, but element ranks and heavy-path data are
               re-derived (global_rank, topology encoding) on every probe
      sampled  every c_d-th rank and every c_h-th depth stored; sets of at
               most c_d elements keep no keys; gaps are closed by comparison
    """

    def __init__(
        self,
        trie: InducedTrie,
        index: TextIndex,
        *,
        level: SamplingLevel = "full",
        c_d: int = 2,
        c_h: int = 2,
        micro_block: int = 2,
        require_consecutive: bool = True,
    ):
        check_sampling_level(level)
        if c_d < 1 or c_h < 1:
            raise ParameterError("sampling steps must be >= 1")
        if require_consecutive and not trie.is_consecutive():
            raise ContractViolation("group leaves are not consecutive in suffix-array order")
        self.trie = trie
        self.index = index
        self.level = level
        self.c_d = c_d
        self.c_h = c_h
        self.decomp = heavy_path_decompose(trie, trie.root)
        self.topology: Optional[GroupTopology] = None
        if level != "full":
            self.topology = encode_group_topology(trie, micro_block, decomposition=self.decomp)

        self.rank_sets: dict[int, _RankSet] = {}
        for v in range(1, trie.node_count):
            p = trie.parent0[v]
            if self.decomp.heavy_child[p] == v:
                continue
            leaves = tuple(trie.leaves[trie.first_leaf[v]:trie.last_leaf[v] + 1])
            ranks = np.asarray([self.global_rank(p, leaf) for leaf in leaves], dtype=np.int64)
            if level == "sampled":
                keys = ranks[::c_d] if len(ranks) > c_d else ranks[:0]
                step = c_d
            else:
                keys = ranks
                step = 1
            self.rank_sets[v] = _RankSet(parent=p, leaves=leaves, keys=keys, step=step)

        if level == "sampled":
            self.path_keys = [depths[::c_h] for depths in self.decomp.depths]
        else:
            self.path_keys = [list(depths) for depths in self.decomp.depths]

        f = len(trie.leaves)
        bound = f * (math.ceil(math.log2(f)) + 1) if f > 1 else f
        if self.d_element_count > bound:
            raise ContractViolation(f"{self.d_element_count} set elements exceed the bound {bound} for f={f}")

    # ----------------------------
    # Size accounting
    # ----------------------------
    @property
    def leaf_count(self) -> int:
        return len(self.trie.leaves)

    @property
    def d_element_count(self) -> int:
        return sum(len(s.leaves) for s in self.rank_sets.values())

    @property
    def d_stored_keys(self) -> int:
        return sum(len(s.keys) for s in self.rank_sets.values())

    @property
    def h_element_count(self) -> int:
        return sum(len(p) for p in self.decomp.paths)

    @property
    def h_stored_keys(self) -> int:
        return sum(len(k) for k in self.path_keys)

    # ----------------------------
    # Element access
    # ----------------------------
    def global_rank(self, w: int, leaf: int, counters: QueryCounters | None = None) -> int:
        """Rank of the suffix that spells str(w, leaf)."""
        position = self.trie.leaf_position(leaf) + self.trie.depth0[w]
        if position > self.index.n - 1:
            raise ContractViolation(f"depth of {w} exceeds the suffix length of leaf {leaf}")
        if counters is not None:
            counters.suffix_materializations += 1
        return self.index.isa_lookup(position, counters)

    def _element_rank(self, s: _RankSet, i: int, counters: QueryCounters | None) -> int:
        if self.level == "full":
            return int(s.keys[i])
        return self.global_rank(s.parent, s.leaves[i], counters)

    def predecessor_in_set(
        self, child: int, query_rank: int, counters: QueryCounters | None = None
    ) -> tuple[Optional[SetHit], Optional[SetHit]]:
        """(largest element <= query_rank, smallest element > query_rank) of D(child)."""
        s = self.rank_sets.get(child)
        if s is None:
            raise ContractViolation(f"node {child} carries no rank set (heavy child or root)")
        before = counters.suffix_materializations if counters is not None else 0
        if counters is not None:
            counters.predecessor_probes += 1
        size = len(s.leaves)

        if s.step == 1:
            i = int(np.searchsorted(s.keys, query_rank, side="right")) - 1
        else:
            # last sampled key <= query_rank, then close the gap by comparison
            i, lo, hi = -1, 0, size
            if len(s.keys):
                block = int(np.searchsorted(s.keys, query_rank, side="right")) - 1
                if block < 0:
                    hi = 0
                else:
                    i = block * s.step
                    lo, hi = i + 1, min(i + s.step, size)
            while lo < hi:
                mid = (lo + hi) // 2
                if self._element_rank(s, mid, counters) <= query_rank:
                    i = mid
                    lo = mid + 1
                else:
                    hi = mid

        pred = SetHit(self._element_rank(s, i, counters), s.leaves[i]) if i >= 0 else None
        succ = SetHit(self._element_rank(s, i + 1, counters), s.leaves[i + 1]) if i + 1 < size else None
        if counters is not None:
            used = counters.suffix_materializations - before
            counters.max_lookup_materializations = max(counters.max_lookup_materializations, used)
        return pred, succ

    # ----------------------------
    # Heavy paths
    # ----------------------------
    def _heavy_info(self, u: int) -> tuple[int, int]:
        if self.topology is not None:
            return heavy_info(self.topology, u)
        return self.decomp.head(u), self.decomp.terminal_leaf(u)

    def _lowest_on_path(self, p: int, target: int, upto: int) -> int:
        """Index of the deepest node among path[0..upto] with depth <= target."""
        keys = self.path_keys[p]
        if self.level != "sampled":
            return bisect_right(keys, target, 0, upto + 1) - 1
        step = self.c_h
        block = bisect_right(keys, target, 0, upto // step + 1) - 1
        path = self.decomp.paths[p]
        lo, hi = block * step, min(block * step + step - 1, upto)
        k = lo
        while lo <= hi:
            mid = (lo + hi) // 2
            if self.trie.depth0[path[mid]] <= target:
                k = mid
                lo = mid + 1
            else:
                hi = mid - 1
        return k

    def _level_ancestor(self, v: int, target: int) -> TrieLocation:
        depth0 = self.trie.depth0
        decomp = self.decomp
        below = -1
        while True:
            p = decomp.path_of[v]
            path = decomp.paths[p]
            i = decomp.index_on_path[v]
            if depth0[path[0]] <= target:
                k = self._lowest_on_path(p, target, i)
                w = path[k]
                if depth0[w] == target:
                    return TrieLocation(w)
                nxt = path[k + 1] if k < i else below
                return TrieLocation(w, nxt, target - depth0[w])
            below = path[0]
            v = decomp.parent[below]

    # ----------------------------
    # Query
    # ----------------------------
    def query(
        self, u: int, handle: PatternHandle, j: int, counters: QueryCounters | None = None
    ) -> tuple[TrieLocation, int]:
        trie = self.trie
        if not 0 <= u < trie.node_count:
            raise ContractViolation(f"node {u} is outside the subtree")
        if counters is not None:
            counters.group_queries += 1
        remaining = len(handle) - j
        if remaining <= 0 or trie.is_leaf(u):
            return TrieLocation(u), 0

        depth0 = trie.depth0
        _, leaf_h = self._heavy_info(u)
        p = self.decomp.path_of[u]
        path = self.decomp.paths[p]

        l0 = handle.lcp_with_suffix(j, self.global_rank(u, leaf_h, counters), counters)
        target = depth0[u] + l0
        k = self._lowest_on_path(p, target, len(path) - 1)
        w = path[k]
        if depth0[w] < target:
            return TrieLocation(w, path[k + 1], target - depth0[w]), l0
        if l0 == remaining or trie.is_leaf(w):
            return TrieLocation(w), l0

        child = trie.child_map0[w].get(handle.symbol(j + l0))
        if child is None:
            return TrieLocation(w), l0
        if child == self.decomp.heavy_child[w]:
            raise ContractViolation("pattern continues along the heavy edge past the probed depth")

        j2 = j + l0
        pred, succ = self.predecessor_in_set(child, handle.rank(j2) - 1, counters)
        best, best_leaf = -1, -1
        for hit in (pred, succ):
            if hit is None:
                continue
            lcp = handle.lcp_with_suffix(j2, hit.rank, counters)
            if lcp > best:
                best, best_leaf = lcp, hit.leaf
        target = depth0[w] + best
        return self._level_ancestor(best_leaf, target), target - depth0[u]


def build_group_lcp(
    trie: InducedTrie,
    index: TextIndex,
    level: SamplingLevel = "full",
    *,
    c_d: int = 2,
    c_h: int = 2,
    micro_block: int = 2,
    require_consecutive: bool = True,
) -> GroupLcpStructure:
    return GroupLcpStructure(
        trie,
        index,
        level=level,
        c_d=c_d,
        c_h=c_h,
        micro_block=micro_block,
        require_consecutive=require_consecutive,
    )


def global_rank(structure: GroupLcpStructure, w: int, leaf: int) -> int:
    return structure.global_rank(w, leaf)


def unrooted_lcp_small(
    structure: GroupLcpStructure, u: int, handle: PatternHandle, j: int,
    counters: QueryCounters | None = None,
) -> tuple[TrieLocation, int]:
    return structure.query(u, handle, j, counters)


def predecessor_in_set(
    structure: GroupLcpStructure, child: int, query_rank: int,
    counters: QueryCounters | None = None,
) -> tuple[Optional[SetHit], Optional[SetHit]]:
    return structure.predecessor_in_set(child, query_rank, counters)
