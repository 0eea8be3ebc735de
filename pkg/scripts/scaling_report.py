# scripts/scaling_report.py
# Run from the repo root: python -m scripts.scaling_report [sizes]

import sys

import pandas as pd

from wcindex.services.bench import run_bench

sizes = [int(x) for x in sys.argv[1].split(",")] if len(sys.argv) > 1 else [256, 1024, 4096, 16384]

frame = run_bench(sizes, sigma=4, queries=30, output="artifacts/scaling.csv", progress=True)

pd.set_option("display.width", 160)
print(frame[["n", "build_seconds", "auxiliary_bits", "bits_per_symbol", "aux_over_nlogn"]])

# the ratio should flatten out, not grow with n
ratios = frame["aux_over_nlogn"].tolist()
print(f"\naux / (n log n): first={ratios[0]:.4f} last={ratios[-1]:.4f}")

bit_columns = [c for c in frame.columns if c.startswith("bits.")]
print("\nShare of auxiliary bits per structure at the largest size:")
last = frame.iloc[-1]
for column in bit_columns:
    print(f"  {column[5:]:<15} {last[column] / last['auxiliary_bits']:.1%}")

mean_columns = [c for c in frame.columns if c.startswith("mean.")]
print("\nMean query counters:")
print(frame[["n"] + mean_columns].to_string(index=False))
