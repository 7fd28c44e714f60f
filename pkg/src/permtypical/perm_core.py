"""Permutations of [1, n]: algebra, action on sequences, cycle structure.

All public interfaces are 1-indexed.  ``Permutation.image[i - 1]`` holds
``pi(i)``.  Cycles are read forward: the cycle ``(a b c)`` means
``pi(a) = b, pi(b) = c, pi(c) = a``.

Sequence action follows ``z = pi(y)`` with ``z[i] = y[pi(i)]``.  Under this
convention composition acts contravariantly on sequences::

    apply(compose(p, q), y) == apply(q, apply(p, y))

The worked examples one usually finds in texts (e.g. ``(1 2 3)(4 5)``
sending ``(a1, ..., a7)`` to ``(a3, a1, a2, a5, a4, a6, a7)``) correspond to
:func:`apply_inverse`.  Typicality probabilities only depend on the cycle
type, which inversion preserves, so the choice does not affect any bound.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Permutation",
    "CycleType",
    "identity",
    "from_image",
    "from_cycles",
    "compose",
    "inverse",
    "conjugate",
    "apply",
    "apply_inverse",
    "cycle_decompose",
    "cycle_type",
    "standard_permutation",
    "standard_from_lengths",
    "same_cycle_type",
    "fixed_points",
    "is_derangement",
    "all_permutations",
    "all_cycle_types",
    "random_permutation",
    "random_with_cycle_type",
    "parse_image",
    "parse_cycles",
    "format_image",
    "format_cycles",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection of [1, n] stored as its image table."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        n = len(image)
        if n == 0:
            raise ValueError("permutation must act on at least one point")
        if sorted(image) != list(range(1, n + 1)):
            raise ValueError(f"image {image} is not a bijection of [1, {n}]")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"point {i} outside [1, {self.n}]")
        return self.image[i - 1]

    def __len__(self) -> int:
        return self.n

    def as_array(self) -> np.ndarray:
        """0-indexed image as an integer array (``a[i] = pi(i + 1) - 1``)."""
        return np.asarray(self.image, dtype=np.intp) - 1

    def __str__(self) -> str:
        return format_cycles(self)


@dataclass(frozen=True)
class CycleType:
    """Conjugacy-class descriptor ``(m, c, i_1 <= ... <= i_c)``.

    ``m`` counts fixed points, ``lengths`` the non-trivial cycle lengths.
    """

    n: int
    m: int
    lengths: tuple[int, ...] = ()

    def __post_init__(self):
        lengths = tuple(sorted(int(v) for v in self.lengths))
        object.__setattr__(self, "lengths", lengths)
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m < 0:
            raise ValueError("fixed-point count must be non-negative")
        if any(v < 2 for v in lengths):
            raise ValueError("non-trivial cycles have length >= 2")
        if self.m + sum(lengths) != self.n:
            raise ValueError(
                f"m + sum(lengths) = {self.m + sum(lengths)} != n = {self.n}"
            )

    @property
    def c(self) -> int:
        return len(self.lengths)

    @classmethod
    def of(cls, m: int, lengths: Iterable[int]) -> "CycleType":
        lengths = tuple(lengths)
        return cls(n=m + sum(lengths), m=m, lengths=lengths)

    def __str__(self) -> str:
        return f"({self.m},{self.c},{list(self.lengths)})"


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("identity needs n >= 1")
    return Permutation(tuple(range(1, n + 1)))


def from_image(image: Sequence[int]) -> Permutation:
    return Permutation(tuple(image))


def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
    """Build a permutation on [1, n] from disjoint cycles (1-cycles allowed)."""
    image = list(range(1, n + 1))
    seen: set[int] = set()
    for cyc in cycles:
        cyc = [int(v) for v in cyc]
        for v in cyc:
            if not 1 <= v <= n:
                raise ValueError(f"cycle entry {v} outside [1, {n}]")
            if v in seen:
                raise ValueError(f"point {v} appears in more than one cycle")
            seen.add(v)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            image[a - 1] = b
    return Permutation(tuple(image))


def _check_sizes(p: Permutation, q: Permutation) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p o q``: the permutation ``i -> p(q(i))``."""
    _check_sizes(p, q)
    return Permutation(tuple(p.image[j - 1] for j in q.image))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.n
    for i, j in enumerate(p.image, start=1):
        inv[j - 1] = i
    return Permutation(tuple(inv))


def conjugate(p: Permutation, s: Permutation) -> Permutation:
    """``s o p o s^-1``; has the same cycle type as ``p``."""
    return compose(compose(s, p), inverse(s))


def apply(p: Permutation, y: Sequence) -> list:
    """Permute a sequence: ``result[i] = y[p(i)]`` (1-indexed)."""
    if len(y) != p.n:
        raise ValueError(f"sequence length {len(y)} != permutation size {p.n}")
    return [y[j - 1] for j in p.image]


def apply_inverse(p: Permutation, y: Sequence) -> list:
    return apply(inverse(p), y)


def cycle_decompose(p: Permutation) -> tuple[list[tuple[int, ...]], CycleType]:
    """Disjoint non-trivial cycles of ``p`` and its cycle type.

    Each cycle starts at its smallest element; cycles are ordered by that
    element.  Fixed points are not reported as 1-cycles.
    """
    seen = [False] * (p.n + 1)
    cycles = []
    m = 0
    for start in range(1, p.n + 1):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = p.image[start - 1]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p.image[j - 1]
        if len(cyc) == 1:
            m += 1
        else:
            cycles.append(tuple(cyc))
    return cycles, CycleType(n=p.n, m=m, lengths=tuple(len(c) for c in cycles))


def cycle_type(p: Permutation) -> CycleType:
    return cycle_decompose(p)[1]


def standard_from_lengths(lengths: Sequence[int], m: int) -> Permutation:
    """Consecutive-block cycles of the given lengths, in the given order,
    followed by ``m`` fixed points."""
    cycles = []
    start = 1
    for length in lengths:
        if length < 2:
            raise ValueError("standard cycles must have length >= 2")
        cycles.append(range(start, start + length))
        start += length
    return from_cycles(start - 1 + m, cycles)


def standard_permutation(ct: CycleType) -> Permutation:
    """Canonical representative of a cycle type: cycles
    ``(1 .. i_1)(i_1+1 .. i_1+i_2)...`` with the last ``m`` points fixed."""
    return standard_from_lengths(ct.lengths, ct.m)


def same_cycle_type(p: Permutation, q: Permutation) -> bool:
    _check_sizes(p, q)
    return cycle_type(p) == cycle_type(q)


def fixed_points(p: Permutation) -> frozenset[int]:
    return frozenset(i for i, j in enumerate(p.image, start=1) if i == j)


def is_derangement(p: Permutation) -> bool:
    return all(i != j for i, j in enumerate(p.image, start=1))


def all_permutations(n: int):
    """Every permutation of [1, n] in lexicographic image order."""
    from itertools import permutations

    for image in permutations(range(1, n + 1)):
        yield Permutation(image)


def _partitions_min2(total: int, smallest: int = 2):
    if total == 0:
        yield ()
        return
    for first in range(smallest, total + 1):
        for rest in _partitions_min2(total - first, first):
            yield (first,) + rest


def all_cycle_types(n: int) -> list[CycleType]:
    """All cycle types on [1, n], ordered by ``m`` descending then lengths."""
    out = []
    for m in range(n, -1, -1):
        for lengths in _partitions_min2(n - m):
            out.append(CycleType(n=n, m=m, lengths=lengths))
    return out


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(v) + 1 for v in rng.permutation(n)))


def random_with_cycle_type(ct: CycleType, rng: np.random.Generator) -> Permutation:
    """Uniform draw from the conjugacy class of ``ct``."""
    s = random_permutation(ct.n, rng)
    return conjugate(standard_permutation(ct), s)


# -- text forms ------------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_image(text: str) -> Permutation:
    """Parse one-line image notation such as ``"5 1 4 3 2"``."""
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ValueError("empty permutation")
    values = []
    for tok in tokens:
        try:
            values.append(int(tok))
        except ValueError:
            raise ValueError(f"bad token {tok!r} in permutation image") from None
    return Permutation(tuple(values))


def parse_cycles(text: str, n: int | None = None) -> Permutation:
    """Parse cycle notation such as ``"(1 2 5)(3 4)"``.

    ``n`` defaults to the largest point mentioned.
    """
    stripped = _CYCLE_RE.sub("", text).strip()
    if stripped:
        raise ValueError(f"bad token {stripped.split()[0]!r} in cycle notation")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        cyc = []
        for tok in body.replace(",", " ").split():
            try:
                cyc.append(int(tok))
            except ValueError:
                raise ValueError(f"bad token {tok!r} in cycle notation") from None
        if cyc:
            cycles.append(cyc)
    top = max((max(c) for c in cycles), default=0)
    if n is None:
        n = top
    if n < 1:
        raise ValueError("cycle notation names no points; pass n explicitly")
    return from_cycles(n, cycles)


def format_image(p: Permutation) -> str:
    return " ".join(str(v) for v in p.image)


def format_cycles(p: Permutation, with_fixed: bool = False) -> str:
    """Cycle notation; fixed points appear as ``(i)`` only if asked."""
    if with_fixed:
        seen = set()
        parts = []
        for start in range(1, p.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = p(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = p(j)
            parts.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(parts)
    cycles, _ = cycle_decompose(p)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)
