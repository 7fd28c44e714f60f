"""Joint types and strong typicality of pairs and collections of sequences.

A sample is typical when every cell frequency lies within ``eps`` of the
target probability, zero-probability cells included, with a closed
inequality.  Membership is decided on integers: each cell gets a count
window ``[ceil(n(p - eps)), floor(n(p + eps))]`` computed in exact rational
arithmetic from the decimal value of ``p`` and ``eps`` (``0.45`` means
``9/20``), so boundary cases never depend on float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .dist import JointDistribution

__all__ = [
    "SequenceSample",
    "JointType",
    "as_rational",
    "joint_type",
    "count_window",
    "within_window",
    "is_typical",
    "parse_sample",
    "format_sample",
]

Real = Union[float, int, Fraction]


@dataclass(frozen=True, eq=False)
class SequenceSample:
    """``k`` sequences of length ``n`` over alphabets of the given sizes.

    ``symbols[l, i]`` is the symbol of sequence ``l + 1`` at position ``i + 1``.
    """

    symbols: np.ndarray
    alphabet_sizes: tuple[int, ...]

    def __post_init__(self):
        sym = np.array(self.symbols, dtype=np.int64)
        if sym.ndim != 2:
            raise ValueError("symbols must be a k x n table")
        sizes = tuple(int(a) for a in self.alphabet_sizes)
        if len(sizes) != sym.shape[0]:
            raise ValueError(f"{sym.shape[0]} rows but {len(sizes)} alphabet sizes")
        for row, a in zip(sym, sizes):
            if row.size and (row.min() < 0 or row.max() >= a):
                raise ValueError(f"symbol outside [0, {a})")
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "alphabet_sizes", sizes)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], alphabet_sizes=None) -> "SequenceSample":
        sym = np.array(rows, dtype=np.int64)
        if alphabet_sizes is None:
            alphabet_sizes = tuple(int(r.max()) + 1 if r.size else 1 for r in sym)
        return cls(sym, tuple(alphabet_sizes))

    @property
    def k(self) -> int:
        return self.symbols.shape[0]

    @property
    def n(self) -> int:
        return self.symbols.shape[1]

    def cells(self) -> np.ndarray:
        """Flat cell index of every column."""
        return np.ravel_multi_index(tuple(self.symbols), self.alphabet_sizes)


@dataclass(frozen=True, eq=False)
class JointType:
    counts: np.ndarray
    n: int

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointType):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.counts, other.counts)


def joint_type(s: SequenceSample) -> JointType:
    """``N(a^k | x_1, ..., x_k)`` for every cell ``a^k``."""
    size = int(np.prod(s.alphabet_sizes))
    counts = np.bincount(s.cells(), minlength=size).reshape(s.alphabet_sizes)
    return JointType(counts=counts, n=s.n)


def as_rational(x: Real) -> Fraction:
    """Exact rational for ``x``; floats are read by their shortest decimal
    repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(repr(xf))


@lru_cache(maxsize=4096)
def _window(probs: tuple[float, ...], eps: Fraction, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lo, hi = [], []
    for p in probs:
        pr = as_rational(p)
        lo.append(max(0, math.ceil(n * (pr - eps))))
        hi.append(min(n, math.floor(n * (pr + eps))))
    return tuple(lo), tuple(hi)


def count_window(d: JointDistribution, eps: Real, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell inclusive count bounds (flattened, C order) for typicality."""
    e = as_rational(eps)
    if e < 0:
        raise ValueError("eps must be non-negative")
    lo, hi = _window(tuple(float(v) for v in d.probs.ravel()), e, int(n))
    return np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64)


def within_window(counts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Row-wise typicality of flattened count tables with shape ``(..., C)``."""
    return np.all((counts >= lo) & (counts <= hi), axis=-1)


def is_typical(s: SequenceSample, d: JointDistribution, eps: Real) -> bool:
    if s.alphabet_sizes != d.alphabet_sizes:
        raise ValueError(f"sample alphabets {s.alphabet_sizes} vs distribution {d.alphabet_sizes}")
    lo, hi = count_window(d, eps, s.n)
    return bool(within_window(joint_type(s).counts.ravel(), lo, hi))


def parse_sample(text: str, alphabet_sizes=None) -> SequenceSample:
    """One row per line, space-separated symbol indices."""
    rows = []
    for lineno, line in enumerate(text.strip().splitlines(), start=1):
        try:
            rows.append([int(t) for t in line.split()])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer symbol") from None
    if len({len(r) for r in rows}) > 1:
        raise ValueError("rows have different lengths")
    return SequenceSample.from_rows(rows, alphabet_sizes)


def format_sample(s: SequenceSample) -> str:
    return "\n".join(" ".join(str(v) for v in row) for row in s.symbols)
