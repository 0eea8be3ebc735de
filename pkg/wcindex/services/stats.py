# wcindex/services/stats.py

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Iterable

import pandas as pd

if TYPE_CHECKING:
    from wcindex.services.wildcard_engine import WildcardIndex


@dataclass
class QueryCounters:
    """Per-query accumulator. Never shared between concurrent queries."""

    standard_lcp: int = 0            # unrooted LCP queries issued by a matching engine
    wildcard_lcp: int = 0            # wildcard LCP queries issued by a matching engine
    unrooted_full_calls: int = 0     # every full-tree unrooted LCP evaluation, nested ones included
    group_queries: int = 0           # queries answered by one group (or marked tree) structure
    predecessor_probes: int = 0
    suffix_materializations: int = 0
    max_lookup_materializations: int = 0
    sa_accesses: int = 0
    edge_checks: int = 0
    wildcard_tree_probes: int = 0
    group_straddles: int = 0

    def merge(self, other: "QueryCounters") -> None:
        for name, value in asdict(other).items():
            if name == "max_lookup_materializations":
                self.max_lookup_materializations = max(self.max_lookup_materializations, value)
            else:
                setattr(self, name, getattr(self, name) + value)

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class StructureCounts:
    n: int
    sigma: int
    tau: int
    lambda_: int
    tree_nodes: int
    marked_leaves: int
    marked_internal: int
    groups: int
    max_group_nodes: int
    d_elements: int
    d_stored_keys: int
    h_elements: int
    h_stored_keys: int
    tm_nodes: int
    tm_d_elements: int
    wildcard_tree_nodes: int
    wildcard_tree_leaves: int
    wildcard_pointers: int
    b_bits: int


@dataclass(frozen=True)
class StatsReport:
    structures: StructureCounts
    bits: dict                       # estimated bits per structure
    counters: QueryCounters = field(default_factory=QueryCounters)
    timings: dict = field(default_factory=dict)   # seconds

    @property
    def auxiliary_bits(self) -> int:
        return int(sum(self.bits.values()))

    @property
    def bits_per_symbol(self) -> float:
        return self.auxiliary_bits / max(1, self.structures.n)

    def records(self) -> list[tuple[str, object]]:
        """Flat (key, value) records in a stable order."""
        rows: list[tuple[str, object]] = []
        for name, value in asdict(self.structures).items():
            rows.append((f"structure.{name}", value))
        for name, value in self.bits.items():
            rows.append((f"bits.{name}", value))
        rows.append(("bits.auxiliary", self.auxiliary_bits))
        rows.append(("bits.per_symbol", round(self.bits_per_symbol, 4)))
        for name, value in self.counters.as_dict().items():
            rows.append((f"counter.{name}", value))
        for name, value in self.timings.items():
            rows.append((f"time.{name}", round(value, 6)))
        return rows

    def to_lines(self) -> list[str]:
        return [f"{key}={value}" for key, value in self.records()]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records(), columns=["key", "value"])


def _bits(value: int) -> int:
    return max(1, math.ceil(math.log2(max(2, value))))


def collect_structure_counts(index: "WildcardIndex") -> StructureCounts:
    part = index.partition
    tree = index.tree
    d_elements = d_keys = h_elements = h_keys = 0
    max_nodes = 0
    for group in part.groups:
        max_nodes = max(max_nodes, group.node_count)
        for half in group.halves:
            d_elements += half.lcp.d_element_count
            d_keys += half.lcp.d_stored_keys
            h_elements += half.lcp.h_element_count
            h_keys += half.lcp.h_stored_keys
    layer = index.layer
    return StructureCounts(
        n=index.text.n,
        sigma=index.text.sigma,
        tau=part.tau,
        lambda_=layer.groups.lambda_,
        tree_nodes=tree.node_count,
        marked_leaves=part.marked_leaf_count,
        marked_internal=part.marked_internal_count,
        groups=len(part.groups),
        max_group_nodes=max_nodes,
        d_elements=d_elements,
        d_stored_keys=d_keys,
        h_elements=h_elements,
        h_stored_keys=h_keys,
        tm_nodes=part.tm.node_count,
        tm_d_elements=part.tm_lcp.d_element_count,
        wildcard_tree_nodes=layer.node_count,
        wildcard_tree_leaves=layer.leaf_count,
        wildcard_pointers=layer.pointer_count,
        b_bits=tree.node_count,
    )


def estimate_bits(counts: StructureCounts) -> dict[str, int]:
    """Bit estimates per structure, as the compact layouts would store them."""
    lg = _bits(counts.n)
    lglg = _bits(lg)
    return {
        "B": counts.b_bits + counts.b_bits // max(1, lg),
        "A_m": (counts.marked_leaves + counts.marked_internal) * lg,
        "tm": counts.tm_nodes * 2 * lg + counts.tm_d_elements * lg,
        "D": counts.d_stored_keys * lglg * lglg,
        "H": counts.h_stored_keys * lglg,
        "routers": counts.groups * lg,
        "wildcard_trees": counts.wildcard_tree_nodes * 2 * lg + counts.wildcard_pointers * lg,
    }


def build_stats_report(
    index: "WildcardIndex",
    counters: QueryCounters | None = None,
    timings: dict | None = None,
) -> StatsReport:
    counts = collect_structure_counts(index)
    return StatsReport(
        structures=counts,
        bits=estimate_bits(counts),
        counters=counters or QueryCounters(),
        timings=dict(timings or {}),
    )


def mean_counters(rows: Iterable[QueryCounters]) -> dict[str, float]:
    frame = pd.DataFrame([r.as_dict() for r in rows])
    if frame.empty:
        return {}
    return {k: float(v) for k, v in frame.mean().items()}
