"""Set partitions, partition correspondence and Bell signatures for k = 3."""

from collections import Counter

from permtypical.counting import bell_count_table
from permtypical.partitions import (
    PermutationVector,
    bell_number,
    bell_signature,
    enumerate_partitions,
    index_correspondence,
)
from permtypical.perm_core import identity, parse_cycles

for j, part in enumerate(enumerate_partitions(3), start=1):
    print(f"slot {j}: {part}")
print("b_3 =", bell_number(3), " b_5 =", bell_number(5))

pv = PermutationVector.of(identity(7), parse_cycles("(1 3 5)(2 4)", 7), parse_cycles("(1 5)(2 4)(3 7)", 7))
for i in range(1, 8):
    print(f"index {i} -> slot {index_correspondence(pv, i)}")
print("signature:", bell_signature(pv))

# how the 576 vectors (id, pi_2, pi_3) on [1, 4] spread over signatures
table = bell_count_table(4, 3)
print(len(table), "signatures realised, total", sum(table.values()))
by_blocks = Counter()
for counts, c in table.items():
    by_blocks[counts[0]] += c
for singles, c in sorted(by_blocks.items()):
    print(f"  {singles} all-distinct indices: {c} vectors")
