"""Explicit bounds next to exact typicality probabilities."""

from permtypical.bounds import decreasing_from, lemma4_bound, lemma5_bound, theorem1_bound
from permtypical.dist import dsbs, mutual_information
from permtypical.montecarlo import exact_typicality_prob
from permtypical.partitions import PermutationVector
from permtypical.perm_core import parse_cycles

d = dsbs(0.25)
print(f"I(X;Y) = {mutual_information(d):.4f} bits")

for n in (4, 6, 8):
    cycle = parse_cycles("(" + " ".join(map(str, range(1, n + 1))) + ")")
    exact = exact_typicality_prob(d, PermutationVector.pair(cycle), n, 0.0)
    bound = lemma4_bound(n, d, 0.0).explicit_bound
    print(f"n={n} single cycle, eps=0: exact {exact:.5f} <= bound {bound:.5f}")

pairs = parse_cycles("(1 2)(3 4)(5 6)")
for eps in (0.0, 0.05):
    exact = exact_typicality_prob(d, PermutationVector.pair(pairs), 6, eps)
    print(f"transpositions, eps={eps}: exact {exact:.5f} <= {lemma5_bound(6, 3, d, eps).explicit_bound:.5f}")

# the fixed-point bound carries a (n+1)^16 factor and needs large n
b = theorem1_bound(1000, 0, dsbs(0.1), 0.0)
print(f"\nfixed-point bound at n=1000: rate {b.exponent_rate:.4f}, bound {b.explicit_bound:.3e}")
print(f"decreasing once n > {decreasing_from(b.poly_exponent, b.exponent_rate):.0f}")
