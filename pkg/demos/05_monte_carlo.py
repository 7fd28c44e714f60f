"""Seeded Monte Carlo estimates and their agreement with enumeration."""

import time

from permtypical.dist import dsbs
from permtypical.montecarlo import TrialConfig, estimate_typicality_prob, exact_typicality_prob
from permtypical.partitions import PermutationVector
from permtypical.perm_core import parse_cycles

d, eps = dsbs(0.2), 0.1
pv = PermutationVector.pair(parse_cycles("(1 2 3)", 6))
exact = exact_typicality_prob(d, pv, 6, eps)
print(f"exact {exact:.6f}")

for trials in (10**3, 10**4, 10**5):
    est = estimate_typicality_prob(TrialConfig(d, pv, 6, eps, trials, seed=3))
    z = (est.p_hat - exact) / est.stderr
    print(f"{trials:>7} trials: {est.p_hat:.5f} +/- {est.stderr:.5f}  ({z:+.2f} stderr)")

cfg = TrialConfig(d, pv, 6, eps, 50_000, seed=3)
t = time.perf_counter()
a = estimate_typicality_prob(cfg, workers=1)
b = estimate_typicality_prob(cfg, workers=4)
print("1 vs 4 workers identical:", a == b, f"({time.perf_counter() - t:.1f}s)")
