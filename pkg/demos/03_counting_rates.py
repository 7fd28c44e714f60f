"""Counts of permutations with m fixed points and their log-growth."""

from permtypical.counting import (
    fixed_point_count_bounds,
    kfold_bounds,
    normalized_log_bell_count,
    normalized_log_fixed_count,
)
from permtypical.partitions import BellSignature

for m in range(6):
    b = fixed_point_count_bounds(5, m)
    print(f"n=5 m={m}: {b.lower:>4} <= {b.exact:>4} <= {b.upper}")

print("3-fold derangements of [1,4]:", kfold_bounds(4, 3))

print("\nlog N_m / (n log n) against 1 - m/n")
for n in (50, 100, 200, 400, 800):
    half = normalized_log_fixed_count(n, n // 2)
    none = normalized_log_fixed_count(n, 0)
    print(f"  n={n:>4}  m=n/2: {half:.4f} (0.5)   m=0: {none:.4f} (1.0)")

# the pair-vector sandwich for a half split
for n in (20, 100, 400):
    r = normalized_log_bell_count(n, 2, BellSignature.of(2, (n // 2, n - n // 2)))
    print(f"  n={n:>4}  half split in [{r.lower:.4f}, {r.upper:.4f}]")
