"""Cycle structure of permutations and why it is all that matters."""

import numpy as np

from permtypical.dist import dsbs
from permtypical.montecarlo import exact_typicality_prob
from permtypical.partitions import PermutationVector
from permtypical.perm_core import (
    CycleType,
    apply_inverse,
    cycle_decompose,
    format_cycles,
    parse_cycles,
    parse_image,
    random_with_cycle_type,
    standard_from_lengths,
)

p = parse_image("5 1 4 3 2")
cycles, ct = cycle_decompose(p)
print("image 5 1 4 3 2 ->", format_cycles(p), "type", ct)

q = parse_cycles("(1 2 5)(3 4)")
print("(1 2 5)(3 4) moves (1..5) to", apply_inverse(q, [1, 2, 3, 4, 5]))

# cycles of length 3 and 2, then two fixed points
std = standard_from_lengths([3, 2], 2)
print("standard permutation:", format_cycles(std, with_fixed=True))

# every member of a conjugacy class gives the same typicality probability
d, eps = dsbs(0.2), 0.1
rng = np.random.default_rng(0)
ct = CycleType.of(2, [3, 2])
values = set()
for _ in range(6):
    r = random_with_cycle_type(ct, rng)
    prob = exact_typicality_prob(d, PermutationVector.pair(r), 7, eps)
    values.add(round(prob, 15))
    print(f"  {format_cycles(r):<18} P(typical) = {prob:.12f}")
print("distinct values across the class:", len(values))
