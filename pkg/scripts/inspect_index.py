# scripts/inspect_index.py
# Run from the repo root: python -m scripts.inspect_index path/to/index.wcix [pattern ...]

import sys

import pandas as pd

from wcindex.services.index_file import load_index
from wcindex.services.stats import QueryCounters, build_stats_report

if len(sys.argv) < 2:
    sys.exit("usage: python -m scripts.inspect_index INDEX [PATTERN ...]")

index = load_index(sys.argv[1])
report = build_stats_report(index, timings=index.timings)

print(f"n={index.n} sigma={index.sigma} params={index.params.as_dict()}")
for line in report.to_lines():
    print(line)

groups = pd.DataFrame(
    [
        {
            "gid": g.gid,
            "kind": g.kind,
            "top": g.top,
            "bottom": g.bottom,
            "nodes": g.node_count,
            "halves": len(g.halves),
        }
        for g in index.partition.groups
    ]
)
print("\nGroups:")
print(groups.describe().loc[["count", "mean", "max"]])
print(groups["kind"].value_counts())

for pattern in sys.argv[2:]:
    base, fast = QueryCounters(), QueryCounters()
    a = index.match_baseline(pattern, base)
    b = index.match_accelerated(pattern, fast)
    status = "ok" if a == b else "MISMATCH"
    print(f"\n{pattern!r}: {len(a)} occurrences ({status})")
    print(f"  baseline    standard={base.standard_lcp}")
    print(f"  accelerated standard={fast.standard_lcp} wildcard={fast.wildcard_lcp}")
