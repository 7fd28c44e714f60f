"""Set partitions of [1, k], Bell numbers and Bell signatures of
permutation vectors.

Partitions are listed in a fixed canonical order: more blocks first, ties
broken by the restricted growth string (RGS) in ascending lexicographic
order.  For k = 3 that order is::

    {1}{2}{3}   {1,2}{3}   {1,3}{2}   {1}{2,3}   {1,2,3}

Slot ``j`` (1-based) of a :class:`BellSignature` refers to the j-th partition
in this order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .perm_core import Permutation, identity, inverse

__all__ = [
    "MAX_K",
    "SetPartition",
    "BellSignature",
    "PermutationVector",
    "enumerate_partitions",
    "bell_number",
    "partition_index",
    "index_correspondence",
    "correspondence_codes",
    "bell_signature",
    "is_kfold_derangement",
    "parse_partition",
    "parse_signature",
    "signatures",
]

MAX_K = 12
# pair-mask lookup tables have 2**(k(k-1)/2) entries
_VECTOR_K = 6


@dataclass(frozen=True)
class SetPartition:
    """A partition of [1, k] into sorted blocks, ordered by smallest element."""

    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if any(len(b) == 0 for b in blocks):
            raise ValueError("blocks must be non-empty")
        flat = [v for b in blocks for v in b]
        if sorted(flat) != list(range(1, self.k + 1)):
            raise ValueError(f"blocks {blocks} do not partition [1, {self.k}]")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        groups: dict[int, list[int]] = {}
        for pos, label in enumerate(rgs, start=1):
            groups.setdefault(label, []).append(pos)
        return cls(k=len(rgs), blocks=tuple(tuple(g) for g in groups.values()))

    @property
    def rgs(self) -> tuple[int, ...]:
        out = [0] * self.k
        for label, block in enumerate(self.blocks):
            for v in block:
                out[v - 1] = label
        return tuple(out)

    def __len__(self) -> int:
        return len(self.blocks)

    def same_block(self, a: int, b: int) -> bool:
        rgs = self.rgs
        return rgs[a - 1] == rgs[b - 1]

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


def _restricted_growth_strings(k: int):
    rgs = [0] * k

    def rec(pos: int, top: int):
        if pos == k:
            yield tuple(rgs)
            return
        for v in range(top + 2):
            rgs[pos] = v
            yield from rec(pos + 1, max(top, v))

    if k == 0:
        yield ()
        return
    yield from rec(1, 0)


@lru_cache(maxsize=None)
def _partitions(k: int) -> tuple[SetPartition, ...]:
    strings = sorted(_restricted_growth_strings(k), key=lambda s: (-(max(s) + 1), s))
    return tuple(SetPartition.from_rgs(s) for s in strings)


def enumerate_partitions(k: int) -> list[SetPartition]:
    """All partitions of [1, k] in canonical order."""
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must lie in [1, {MAX_K}], got {k}")
    return list(_partitions(k))


def bell_number(k: int) -> int:
    """k-th Bell number by the Bell triangle."""
    if k < 0:
        raise ValueError("k must be non-negative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


@lru_cache(maxsize=None)
def _rgs_lookup(k: int) -> dict[tuple[int, ...], int]:
    return {p.rgs: j for j, p in enumerate(_partitions(k), start=1)}


def partition_index(partition: SetPartition) -> int:
    """1-based slot of a partition in the canonical order."""
    return _rgs_lookup(partition.k)[partition.rgs]


@dataclass(frozen=True)
class BellSignature:
    """Counts ``(i_1, ..., i_{b_k})`` of indices per canonical partition."""

    k: int
    n: int
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) != bell_number(self.k):
            raise ValueError(
                f"signature for k={self.k} needs {bell_number(self.k)} slots, got {len(counts)}"
            )
        if any(c < 0 for c in counts):
            raise ValueError("signature counts must be non-negative")
        if sum(counts) != self.n:
            raise ValueError(f"signature sums to {sum(counts)}, expected n={self.n}")

    @classmethod
    def of(cls, k: int, counts: Sequence[int]) -> "BellSignature":
        return cls(k=k, n=sum(counts), counts=tuple(counts))

    def weights(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def __str__(self) -> str:
        return ",".join(map(str, self.counts))


@dataclass(frozen=True)
class PermutationVector:
    """A tuple ``(pi_1, ..., pi_k)`` of permutations on the same [1, n]."""

    perms: tuple[Permutation, ...]

    def __post_init__(self):
        perms = tuple(self.perms)
        if not perms:
            raise ValueError("permutation vector must be non-empty")
        sizes = {p.n for p in perms}
        if len(sizes) != 1:
            raise ValueError(f"permutations act on different sizes {sorted(sizes)}")
        object.__setattr__(self, "perms", perms)

    @classmethod
    def of(cls, *perms: Permutation) -> "PermutationVector":
        return cls(tuple(perms))

    @classmethod
    def pair(cls, p: Permutation) -> "PermutationVector":
        """``(identity, p)``: the setting of comparing ``X`` with ``p(Y)``."""
        return cls((identity(p.n), p))

    @property
    def k(self) -> int:
        return len(self.perms)

    @property
    def n(self) -> int:
        return self.perms[0].n

    def __iter__(self):
        return iter(self.perms)

    def __getitem__(self, idx: int) -> Permutation:
        return self.perms[idx]


def _rgs_of_values(values: Sequence[int]) -> tuple[int, ...]:
    labels: dict[int, int] = {}
    return tuple(labels.setdefault(v, len(labels)) for v in values)


def index_correspondence(pv: PermutationVector, i: int) -> int:
    """Slot ``j`` of the partition that index ``i`` corresponds to.

    Coordinates ``l`` and ``l'`` share a block iff
    ``pi_l^{-1}(i) == pi_{l'}^{-1}(i)``.
    """
    if not 1 <= i <= pv.n:
        raise IndexError(f"index {i} outside [1, {pv.n}]")
    pre = [inverse(p)(i) for p in pv]
    return _rgs_lookup(pv.k)[_rgs_of_values(pre)]


@lru_cache(maxsize=None)
def _pair_mask_table(k: int) -> np.ndarray:
    """Map a bitmask over coordinate pairs ``l < l'`` (bit set when equal) to
    the 1-based partition slot; -1 for non-transitive masks."""
    pairs = list(combinations(range(k), 2))
    table = np.full(1 << len(pairs), -1, dtype=np.int64)
    for j, part in enumerate(_partitions(k), start=1):
        rgs = part.rgs
        mask = 0
        for bit, (a, b) in enumerate(pairs):
            if rgs[a] == rgs[b]:
                mask |= 1 << bit
        table[mask] = j
    return table


def correspondence_codes(preimages: np.ndarray) -> np.ndarray:
    """Vectorised partition correspondence.

    ``preimages`` has shape ``(..., k, n)`` with entry ``[l, i]`` equal to
    ``pi_l^{-1}(i)`` (any consistent indexing).  Returns 1-based slots with
    shape ``(..., n)``.
    """
    k = preimages.shape[-2]
    if k > _VECTOR_K:
        raise ValueError(f"vectorised correspondence supports k <= {_VECTOR_K}")
    mask = np.zeros(preimages.shape[:-2] + preimages.shape[-1:], dtype=np.int64)
    for bit, (a, b) in enumerate(combinations(range(k), 2)):
        mask |= (preimages[..., a, :] == preimages[..., b, :]).astype(np.int64) << bit
    return _pair_mask_table(k)[mask]


def bell_signature(pv: PermutationVector) -> BellSignature:
    b = bell_number(pv.k)
    if pv.k > _VECTOR_K:
        counts = [0] * b
        for i in range(1, pv.n + 1):
            counts[index_correspondence(pv, i) - 1] += 1
        return BellSignature(k=pv.k, n=pv.n, counts=tuple(counts))
    pre = np.stack([inverse(p).as_array() for p in pv])
    codes = correspondence_codes(pre)
    counts = np.bincount(codes - 1, minlength=b)
    return BellSignature(k=pv.k, n=pv.n, counts=tuple(int(c) for c in counts))


def is_kfold_derangement(pv: PermutationVector) -> bool:
    """First permutation is the identity and all permutations disagree
    pointwise."""
    if pv[0] != identity(pv.n):
        return False
    for i in range(1, pv.n + 1):
        values = {p(i) for p in pv}
        if len(values) != pv.k:
            return False
    return True


def parse_partition(text: str) -> SetPartition:
    """Parse ``"{1,2}{3}"``."""
    bodies = re.findall(r"\{([^{}]*)\}", text)
    if not bodies or re.sub(r"\{[^{}]*\}", "", text).strip():
        raise ValueError(f"malformed partition {text!r}")
    blocks = [tuple(int(t) for t in b.replace(",", " ").split()) for b in bodies]
    k = sum(len(b) for b in blocks)
    return SetPartition(k=k, blocks=tuple(blocks))


def parse_signature(text: str, k: int | None = None) -> BellSignature:
    """Parse ``"2,1,0,3,1"``; ``k`` is inferred from the slot count if absent."""
    try:
        counts = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise ValueError(f"malformed signature {text!r}") from None
    if k is None:
        k = next((kk for kk in range(1, MAX_K + 1) if bell_number(kk) == len(counts)), None)
        if k is None:
            raise ValueError(f"{len(counts)} slots is not a Bell number")
    return BellSignature.of(k, counts)


def signatures(n: int, k: int) -> Iterable[BellSignature]:
    """Every composition of n into b_k non-negative parts, as signatures."""
    b = bell_number(k)

    def rec(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    for counts in rec(n, b):
        yield BellSignature(k=k, n=n, counts=counts)
