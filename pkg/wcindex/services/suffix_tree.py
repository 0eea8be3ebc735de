# wcindex/services/suffix_tree.py

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Optional, Protocol, Sequence

from wcindex.config import MAX_GROUP_NODES
from wcindex.services.errors import ContractViolation
from wcindex.services.suffix_core import SENTINEL, TextIndex

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Location:
    """
    A point in the tree: node `upper` itself (offset 0, child -1), or
    `offset` symbols down the edge from `upper` to `child`.
    """

    upper: int
    child: int = -1
    offset: int = 0

    @property
    def is_node(self) -> bool:
        return self.offset == 0

    @property
    def lower(self) -> int:
        """The node at or directly below this location."""
        return self.upper if self.offset == 0 else self.child


class TreeLike(Protocol):
    node_count: int
    root: int

    def children_of(self, v: int) -> Sequence[int]: ...

    def string_depth(self, v: int) -> int: ...

    def subtree_range(self, v: int) -> range: ...


# ----------------------------
# Suffix tree
# ----------------------------
class SuffixTree:
    """
    Compressed trie of all suffixes, node ids in preorder (root = 0).

    Children are kept in first-symbol order, so leaves in preorder follow
    suffix-array order; edge labels are (label_start, edge length) views
    into the text.
    """

    root = 0

    def __init__(self, index: TextIndex, parent: Sequence[int], depth: Sequence[int], suffix: Sequence[int]):
        self.index = index
        self.parent = list(parent)
        self.depth = list(depth)
        self.suffix = list(suffix)
        self.node_count = len(self.parent)
        self.children: list[list[int]] = [[] for _ in range(self.node_count)]
        for v in range(1, self.node_count):
            p = self.parent[v]
            if not 0 <= p < v:
                raise ContractViolation("parent array is not in preorder")
            self.children[p].append(v)
        self._finish()

    @classmethod
    def from_index(cls, index: TextIndex) -> "SuffixTree":
        sa = index.suffix_array().tolist()
        lcp = index.lcp_array.tolist()
        n = index.n
        depth = [0]
        suffix = [-1]
        kids: list[list[int]] = [[]]

        def new_node(d: int, s: int) -> int:
            depth.append(d)
            suffix.append(s)
            kids.append([])
            return len(depth) - 1

        stack = [0]
        for r in range(n):
            h = lcp[r] if r else 0
            while depth[stack[-1]] > h:
                last = stack.pop()
                top = stack[-1]
                if depth[top] < h:
                    w = new_node(h, -1)
                    kids[w].append(last)
                    stack.append(w)
                    break
                kids[top].append(last)
            stack.append(new_node(n - sa[r], sa[r]))
        while len(stack) > 1:
            last = stack.pop()
            kids[stack[-1]].append(last)

        # renumber in preorder
        order: list[int] = []
        todo = [0]
        while todo:
            v = todo.pop()
            order.append(v)
            todo.extend(reversed(kids[v]))
        new_id = [0] * len(order)
        for i, v in enumerate(order):
            new_id[v] = i
        parent = [-1] * len(order)
        for v in order:
            for c in kids[v]:
                parent[new_id[c]] = new_id[v]
        tree = cls(index, parent, [depth[v] for v in order], [suffix[v] for v in order])
        logger.info("built suffix tree: %d nodes, %d leaves", tree.node_count, n)
        return tree

    def _finish(self) -> None:
        count = self.node_count
        self.leaf_rank = [-1] * count
        self.leaf_of_rank: list[int] = []
        for v in range(count):
            if not self.children[v]:
                if self.suffix[v] < 0:
                    raise ContractViolation(f"leaf {v} carries no suffix")
                self.leaf_rank[v] = len(self.leaf_of_rank)
                self.leaf_of_rank.append(v)
        self.lb = [0] * count
        self.rb = [0] * count
        self.end = [0] * count
        for v in range(count - 1, -1, -1):
            kids = self.children[v]
            if kids:
                self.lb[v] = self.lb[kids[0]]
                self.rb[v] = self.rb[kids[-1]]
                self.end[v] = self.end[kids[-1]]
            else:
                self.lb[v] = self.rb[v] = self.leaf_rank[v]
                self.end[v] = v
        self.label_start = [0] * count
        self.child_map: list[dict[int, int]] = [dict() for _ in range(count)]
        text = self.index.symbol_at
        for v in range(1, count):
            p = self.parent[v]
            self.label_start[v] = self.suffix[self.leaf_of_rank[self.lb[v]]] + self.depth[p]
            self.child_map[p][text(self.label_start[v])] = v

    # ----------------------------
    # Navigation
    # ----------------------------
    def children_of(self, v: int) -> Sequence[int]:
        return self.children[v]

    def string_depth(self, v: int) -> int:
        return self.depth[v]

    def subtree_range(self, v: int) -> range:
        return range(v, self.end[v] + 1)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def leaf_count(self, v: int) -> int:
        return self.rb[v] - self.lb[v] + 1

    def edge_length(self, v: int) -> int:
        return self.depth[v] - self.depth[self.parent[v]]

    def first_symbol(self, v: int) -> int:
        return self.index.symbol_at(self.label_start[v])

    def leaf_position(self, leaf: int) -> int:
        return self.suffix[leaf]

    def any_leaf_position(self, v: int) -> int:
        return self.suffix[self.leaf_of_rank[self.lb[v]]]

    @cached_property
    def heavy(self) -> "HeavyPathDecomposition":
        return heavy_path_decompose(self, self.root)

    # ----------------------------
    # Locations
    # ----------------------------
    def make_location(self, upper: int, child: int, offset: int) -> Location:
        if offset == 0:
            return Location(upper)
        length = self.depth[child] - self.depth[upper]
        if offset == length:
            return Location(child)
        if not 0 < offset < length or self.parent[child] != upper:
            raise ContractViolation(f"offset {offset} invalid on edge {upper}->{child}")
        return Location(upper, child, offset)

    def location_depth(self, loc: Location) -> int:
        return self.depth[loc.upper] + loc.offset

    def location_at_depth(self, node: int, target: int) -> Location:
        """The location at string depth `target` on the root-to-`node` path."""
        if target > self.depth[node] or target < 0:
            raise ContractViolation(f"depth {target} not on the path to node {node}")
        w, child = self.heavy.level_ancestor(node, target)
        if child < 0:
            return Location(w)
        return Location(w, child, target - self.depth[w])

    def locate_interval(self, lo: int, hi: int, target: int) -> Location:
        """Location of the string shared (to `target` symbols) by suffix ranks [lo, hi)."""
        return self.location_at_depth(self.leaf_of_rank[lo], target)

    def step_down(self, loc: Location, symbol: int) -> Optional[Location]:
        if loc.offset == 0:
            child = self.child_map[loc.upper].get(symbol)
            if child is None:
                return None
            return self.make_location(loc.upper, child, 1)
        if self.index.symbol_at(self.label_start[loc.child] + loc.offset) != symbol:
            return None
        return self.make_location(loc.upper, loc.child, loc.offset + 1)

    def steps_all(self, loc: Location) -> list[tuple[int, Location]]:
        """Every one-symbol extension of `loc` except through the sentinel."""
        if loc.offset == 0:
            out = []
            for child in self.children[loc.upper]:
                symbol = self.first_symbol(child)
                if symbol != SENTINEL:
                    out.append((symbol, self.make_location(loc.upper, child, 1)))
            return out
        symbol = self.index.symbol_at(self.label_start[loc.child] + loc.offset)
        if symbol == SENTINEL:
            return []
        return [(symbol, self.make_location(loc.upper, loc.child, loc.offset + 1))]

    def path_label(self, loc: Location) -> tuple[int, ...]:
        target = self.location_depth(loc)
        start = self.any_leaf_position(loc.lower)
        return self.index.segment(start, start + target)

    def leaf_interval(self, loc: Location) -> tuple[int, int]:
        v = loc.lower
        return self.lb[v], self.rb[v]

    def to_arrays(self) -> tuple[list[int], list[int], list[int]]:
        return self.parent, self.depth, self.suffix


def build_suffix_tree(idx: TextIndex) -> SuffixTree:
    return SuffixTree.from_index(idx)


def string_depth(tree: SuffixTree, node: int) -> int:
    return tree.depth[node]


def naive_descend(tree: SuffixTree, start: Location, s: Iterable[int]) -> tuple[Location, int]:
    """Walk symbol by symbol; the lowest location below `start` spelling a prefix of s."""
    current = start
    matched = 0
    for symbol in s:
        nxt = tree.step_down(current, symbol)
        if nxt is None:
            break
        current = nxt
        matched += 1
    return current, matched


# ----------------------------
# Heavy paths
# ----------------------------
@dataclass
class HeavyPathDecomposition:
    root: int
    paths: list[list[int]]
    path_of: list[int]
    index_on_path: list[int]
    heavy_child: list[int]
    parent: list[int]
    leaf_counts: list[int]
    depths: list[list[int]] = field(repr=False)

    def members(self) -> list[int]:
        return [v for path in self.paths for v in path]

    def head(self, v: int) -> int:
        return self.paths[self.path_of[v]][0]

    def terminal_leaf(self, v: int) -> int:
        return self.paths[self.path_of[v]][-1]

    def crossings(self, v: int) -> int:
        """Number of heavy paths met on the walk from the root to v."""
        count = 1
        head = self.head(v)
        while head != self.root:
            head = self.head(self.parent[head])
            count += 1
        return count

    def level_ancestor(self, v: int, target: int) -> tuple[int, int]:
        """Lowest ancestor-or-self w of v with depth <= target, and w's child toward v (-1 if depth(w) == target)."""
        below = -1
        while True:
            p = self.path_of[v]
            path = self.paths[p]
            depths = self.depths[p]
            i = self.index_on_path[v]
            if depths[0] <= target:
                k = bisect_right(depths, target, 0, i + 1) - 1
                w = path[k]
                if depths[k] == target:
                    return w, -1
                return w, (path[k + 1] if k < i else below)
            below = path[0]
            v = self.parent[below]
            if v < 0:
                raise ContractViolation(f"depth {target} above the decomposition root")


def heavy_path_decompose(
    tree: TreeLike,
    subtree_root: int,
    membership: Optional[Callable[[int], bool]] = None,
) -> HeavyPathDecomposition:
    """
    Split the member subtree under `subtree_root` into heavy paths. The heavy
    child has the most leaves; ties go to the smallest first edge symbol.
    """
    member = membership or (lambda v: True)
    if not member(subtree_root):
        raise ContractViolation(f"subtree root {subtree_root} is not a member")
    count = tree.node_count
    parent = [-1] * count
    member_children: dict[int, list[int]] = {}
    order: list[int] = []
    stack = [subtree_root]
    while stack:
        v = stack.pop()
        order.append(v)
        kids = [c for c in tree.children_of(v) if member(c)]
        member_children[v] = kids
        for c in kids:
            parent[c] = v
        stack.extend(reversed(kids))
    if membership is not None:
        reached = set(order)
        for v in tree.subtree_range(subtree_root):
            if member(v) and v not in reached:
                raise ContractViolation(f"member {v} is disconnected from {subtree_root}")

    leaves = [0] * count
    heavy = [-1] * count
    for v in reversed(order):
        kids = member_children[v]
        if not kids:
            leaves[v] = 1
            continue
        best = kids[0]
        total = 0
        for c in kids:
            total += leaves[c]
            if leaves[c] > leaves[best]:
                best = c
        leaves[v] = total
        heavy[v] = best

    paths: list[list[int]] = []
    depths: list[list[int]] = []
    path_of = [-1] * count
    index_on_path = [-1] * count
    for v in order:
        if v != subtree_root and heavy[parent[v]] == v:
            continue
        path = []
        u = v
        while u >= 0:
            path_of[u] = len(paths)
            index_on_path[u] = len(path)
            path.append(u)
            u = heavy[u]
        paths.append(path)
        depths.append([tree.string_depth(u) for u in path])
    return HeavyPathDecomposition(
        root=subtree_root,
        paths=paths,
        path_of=path_of,
        index_on_path=index_on_path,
        heavy_child=heavy,
        parent=parent,
        leaf_counts=leaves,
        depths=depths,
    )


# ----------------------------
# Marking helpers (shared by the partition and the topology encoding)
# ----------------------------
def mark_nodes_generic(tree: TreeLike, leaves_in_order: Sequence[int], every: int) -> tuple[list[bool], list[bool]]:
    """
    Mark every `every`-th leaf (phase 0), every node with two or more children
    holding marked nodes, and the root. Returns (marked, has_marked_below_or_self).
    Node ids must be preorder.
    """
    count = tree.node_count
    marked = [False] * count
    for leaf in leaves_in_order[::every]:
        marked[leaf] = True
    has = [False] * count
    for v in range(count - 1, -1, -1):
        kids = tree.children_of(v)
        if not kids:
            has[v] = marked[v]
            continue
        hits = sum(1 for c in kids if has[c])
        if hits >= 2:
            marked[v] = True
        has[v] = marked[v] or hits > 0
    marked[tree.root] = True
    return marked, has


def child_runs(children: Sequence[int], has_marked: Sequence[bool]) -> list[tuple[int, int, int]]:
    """
    Cut a child list into runs holding exactly one child with marked
    descendants: (start, stop, index of that child). Leading children without
    marks join the first run, the others join the run on their left.
    """
    hits = [i for i, c in enumerate(children) if has_marked[c]]
    runs = []
    for j, i in enumerate(hits):
        start = 0 if j == 0 else i
        stop = len(children) if j == len(hits) - 1 else hits[j + 1]
        runs.append((start, stop, i))
    return runs


# ----------------------------
# Induced subtrees
# ----------------------------
@dataclass(frozen=True, order=True)
class TrieLocation:
    upper: int
    child: int = -1
    offset: int = 0

    @property
    def lower(self) -> int:
        return self.upper if self.offset == 0 else self.child


class InducedTrie:
    """
    The subtree of the suffix tree induced by a set of member nodes: each
    member's parent is its nearest member ancestor, so an edge may span
    several suffix tree edges. Local ids are preorder, 0 is the top.
    """

    root = 0

    def __init__(self, tree: SuffixTree, members: Iterable[int]):
        self.tree = tree
        nodes = sorted(set(members))
        if not nodes:
            raise ContractViolation("induced subtree needs at least one member")
        self.nodes = nodes
        self.node_count = len(nodes)
        self.local_of = {v: i for i, v in enumerate(nodes)}
        self.parent0 = [-1] * self.node_count
        self.children0: list[list[int]] = [[] for _ in range(self.node_count)]
        stack: list[int] = []
        for i, v in enumerate(nodes):
            while stack and v > tree.end[nodes[stack[-1]]]:
                stack.pop()
            if i > 0:
                if not stack:
                    raise ContractViolation(f"member {v} is not below {nodes[0]}")
                self.parent0[i] = stack[-1]
                self.children0[stack[-1]].append(i)
            stack.append(i)

        self.depth0 = [tree.depth[v] for v in nodes]
        self.leaves: list[int] = []
        self.leaf_index = [-1] * self.node_count
        for i in range(self.node_count):
            if not self.children0[i]:
                if not tree.is_leaf(nodes[i]):
                    raise ContractViolation(f"member {nodes[i]} has no member below it but is not a leaf")
                self.leaf_index[i] = len(self.leaves)
                self.leaves.append(i)
        self.first_leaf = [0] * self.node_count
        self.last_leaf = [0] * self.node_count
        self.end0 = [0] * self.node_count
        for i in range(self.node_count - 1, -1, -1):
            kids = self.children0[i]
            if kids:
                self.first_leaf[i] = self.first_leaf[kids[0]]
                self.last_leaf[i] = self.last_leaf[kids[-1]]
                self.end0[i] = self.end0[kids[-1]]
            else:
                self.first_leaf[i] = self.last_leaf[i] = self.leaf_index[i]
                self.end0[i] = i
        self.child_map0: list[dict[int, int]] = [dict() for _ in range(self.node_count)]
        for i in range(1, self.node_count):
            p = self.parent0[i]
            self.child_map0[p][self.edge_symbol(i, 0)] = i

    # TreeLike
    def children_of(self, i: int) -> Sequence[int]:
        return self.children0[i]

    def string_depth(self, i: int) -> int:
        return self.depth0[i]

    def subtree_range(self, i: int) -> range:
        return range(i, self.end0[i] + 1)

    def is_leaf(self, i: int) -> bool:
        return not self.children0[i]

    def real(self, i: int) -> int:
        return self.nodes[i]

    def leaf_position(self, i: int) -> int:
        return self.tree.suffix[self.nodes[i]]

    def any_leaf_position(self, i: int) -> int:
        return self.leaf_position(self.leaves[self.first_leaf[i]])

    def leaf_rank(self, i: int) -> int:
        return self.tree.leaf_rank[self.nodes[i]]

    @property
    def leaf_ranks(self) -> list[int]:
        return [self.leaf_rank(i) for i in self.leaves]

    def is_consecutive(self) -> bool:
        ranks = self.leaf_ranks
        return ranks == list(range(ranks[0], ranks[0] + len(ranks)))

    def edge_symbol(self, i: int, offset: int) -> int:
        """Symbol `offset` positions below the parent on the edge into member i."""
        return self.tree.index.symbol_at(self.any_leaf_position(i) + self.depth0[self.parent0[i]] + offset)

    def make_location(self, upper: int, child: int, offset: int) -> TrieLocation:
        if offset == 0:
            return TrieLocation(upper)
        if offset == self.depth0[child] - self.depth0[upper]:
            return TrieLocation(child)
        return TrieLocation(upper, child, offset)

    def location_depth(self, loc: TrieLocation) -> int:
        return self.depth0[loc.upper] + loc.offset

    def real_location(self, loc: TrieLocation) -> Location:
        if loc.offset == 0:
            return Location(self.nodes[loc.upper])
        return self.tree.location_at_depth(self.nodes[loc.child], self.location_depth(loc))

    def naive_descend(self, start: int, s: Sequence[int]) -> tuple[TrieLocation, int]:
        """Reference descent restricted to member edges."""
        loc = TrieLocation(start)
        matched = 0
        for symbol in s:
            if loc.offset == 0:
                child = self.child_map0[loc.upper].get(symbol)
                if child is None:
                    break
                loc = self.make_location(loc.upper, child, 1)
            else:
                if self.edge_symbol(loc.child, loc.offset) != symbol:
                    break
                loc = self.make_location(loc.upper, loc.child, loc.offset + 1)
            matched += 1
        return loc, matched


# ----------------------------
# Compact per-group heavy-path encoding
# ----------------------------
_OPEN, _CLOSE, _SLOT = 1, 2, 3


@dataclass(frozen=True)
class TopologyBlock:
    top: int                   # marked node the block hangs from
    nodes: tuple[int, ...]     # unmarked members, block preorder
    slots: tuple[int, ...]     # marked members hanging below the block, block preorder
    code: int                  # two bits per token: open, close, slot
    tokens: int
    weights: tuple[int, ...]   # leaf count under each slot
    base: int                  # index of the first leaf spanned by the block


@dataclass(frozen=True)
class _DecodedBlock:
    parent: tuple[int, ...]            # block-local parent, -1 for run children
    heavy: tuple[int, ...]             # block-local heavy child, -1 when it is a slot or none
    chain_end: tuple[tuple[bool, int], ...]  # (is_slot, leaf offset or slot index)


@lru_cache(maxsize=4096)
def _decode_block(code: int, tokens: int, weights: tuple[int, ...]) -> _DecodedBlock:
    """Shape and heavy structure of one block; cached per distinct topology."""
    parent: list[int] = []
    kids: list[list[tuple[bool, int]]] = []
    slot_count = 0
    stack: list[int] = []
    for t in range(tokens):
        token = (code >> (2 * t)) & 3
        if token == _OPEN:
            node = len(parent)
            parent.append(stack[-1] if stack else -1)
            kids.append([])
            if stack:
                kids[stack[-1]].append((False, node))
            stack.append(node)
        elif token == _CLOSE:
            stack.pop()
        else:
            if stack:
                kids[stack[-1]].append((True, slot_count))
            slot_count += 1

    size = len(parent)
    leaves = [0] * size
    heavy_item: list[Optional[tuple[bool, int]]] = [None] * size
    for v in range(size - 1, -1, -1):
        if not kids[v]:
            leaves[v] = 1
            continue
        best = None
        best_count = -1
        total = 0
        for is_slot, ref in kids[v]:
            c = weights[ref] if is_slot else leaves[ref]
            total += c
            if c > best_count:
                best, best_count = (is_slot, ref), c
        leaves[v] = total
        heavy_item[v] = best

    # leaf offsets in block preorder
    offsets = [0] * size
    running = 0
    node = -1
    slot = 0
    for t in range(tokens):
        token = (code >> (2 * t)) & 3
        if token == _OPEN:
            node += 1
            if not kids[node]:
                offsets[node] = running
                running += 1
        elif token == _SLOT:
            running += weights[slot]
            slot += 1

    chain_end: list[tuple[bool, int]] = [(False, 0)] * size
    heavy_local = [-1] * size
    for v in range(size - 1, -1, -1):
        item = heavy_item[v]
        if item is None:
            chain_end[v] = (False, offsets[v])
        elif item[0]:
            chain_end[v] = (True, item[1])
        else:
            heavy_local[v] = item[1]
            chain_end[v] = chain_end[item[1]]
    return _DecodedBlock(tuple(parent), tuple(heavy_local), tuple(chain_end))


@dataclass
class GroupTopology:
    """
    Block topologies plus explicit (head, terminal leaf, heavy child) entries for
    marked members only; everything else is decoded on demand.
    """

    trie: InducedTrie
    micro_block: int
    explicit: dict[int, tuple[int, int, int]]
    blocks: list[TopologyBlock]
    block_of: dict[int, tuple[int, int]]    # member -> (block id, block-local index)

    @property
    def explicit_entries(self) -> int:
        return len(self.explicit)

    @property
    def topology_bits(self) -> int:
        return sum(2 * b.tokens for b in self.blocks)


def encode_group_topology(
    trie: InducedTrie,
    micro_block: int,
    *,
    max_nodes: int = MAX_GROUP_NODES,
    decomposition: Optional[HeavyPathDecomposition] = None,
) -> GroupTopology:
    if trie.node_count > max_nodes:
        raise ContractViolation(f"group of {trie.node_count} nodes exceeds the bound {max_nodes}")
    if micro_block < 1:
        raise ContractViolation("micro_block must be >= 1")
    decomp = decomposition or heavy_path_decompose(trie, trie.root)
    marked, has = mark_nodes_generic(trie, trie.leaves, micro_block)

    explicit = {
        v: (decomp.head(v), decomp.terminal_leaf(v), decomp.heavy_child[v])
        for v in range(trie.node_count)
        if marked[v]
    }
    blocks: list[TopologyBlock] = []
    block_of: dict[int, tuple[int, int]] = {}
    for top in range(trie.node_count):
        if not marked[top] or trie.is_leaf(top):
            continue
        kids = trie.children0[top]
        for start, stop, _ in child_runs(kids, has):
            nodes: list[int] = []
            slots: list[int] = []
            weights: list[int] = []
            stream: list[int] = []
            todo: list[tuple[int, bool]] = [(c, False) for c in reversed(kids[start:stop])]
            while todo:
                v, closing = todo.pop()
                if closing:
                    stream.append(_CLOSE)
                    continue
                if marked[v]:
                    slots.append(v)
                    weights.append(trie.last_leaf[v] - trie.first_leaf[v] + 1)
                    stream.append(_SLOT)
                    continue
                block_of[v] = (len(blocks), len(nodes))
                nodes.append(v)
                stream.append(_OPEN)
                todo.append((v, True))
                todo.extend((c, False) for c in reversed(trie.children0[v]))
            code = 0
            for t, token in enumerate(stream):
                code |= token << (2 * t)
            blocks.append(TopologyBlock(
                top=top,
                nodes=tuple(nodes),
                slots=tuple(slots),
                code=code,
                tokens=len(stream),
                weights=tuple(weights),
                base=trie.first_leaf[kids[start]],
            ))
    return GroupTopology(trie=trie, micro_block=micro_block, explicit=explicit, blocks=blocks, block_of=block_of)


def heavy_info(encoding: GroupTopology, node: int) -> tuple[int, int]:
    """(head of node's heavy path, leaf terminating it), local ids of the encoded trie."""
    entry = encoding.explicit.get(node)
    if entry is not None:
        return entry[0], entry[1]
    block_id, i = encoding.block_of[node]
    block = encoding.blocks[block_id]
    decoded = _decode_block(block.code, block.tokens, block.weights)

    is_slot, ref = decoded.chain_end[i]
    if is_slot:
        leaf = encoding.explicit[block.slots[ref]][1]
    else:
        leaf = encoding.trie.leaves[block.base + ref]

    j = i
    while decoded.parent[j] >= 0 and decoded.heavy[decoded.parent[j]] == j:
        j = decoded.parent[j]
    if decoded.parent[j] < 0:
        top = encoding.explicit[block.top]
        head = top[0] if top[2] == block.nodes[j] else block.nodes[j]
    else:
        head = block.nodes[j]
    return head, leaf
