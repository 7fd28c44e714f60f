"""Exact counts and closed-form sandwiches for derangements, permutations
with a given number of fixed points, k-fold derangements and Bell
permutation vectors.

Counts are Python integers throughout.  Exhaustive oracles enumerate tuples
of permutations and refuse to run past :data:`ENUMERATION_GUARD` candidate
tuples.

Bell-vector counts fix ``pi_1`` to the identity.  The number of vectors
without that restriction is ``n!`` times larger (see
:func:`unrestricted_multiplier`).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Optional, Union

import numpy as np

from .errors import InfeasibleEnumeration
from .partitions import (
    BellSignature,
    bell_number,
    correspondence_codes,
    enumerate_partitions,
)

__all__ = [
    "ENUMERATION_GUARD",
    "CountBounds",
    "log2_int",
    "derangements",
    "count_fixed_point_perms",
    "fixed_point_count_bounds",
    "normalized_log_fixed_count",
    "exact_kfold_derangements",
    "kfold_bounds",
    "bell_count_table",
    "exact_bell_count",
    "bell_count_bounds",
    "normalized_log_bell_count",
    "bell_rate_target",
    "multinomial",
    "unrestricted_multiplier",
]

ENUMERATION_GUARD = 10**7

Number = Union[int, float]


@dataclass(frozen=True)
class CountBounds:
    """``lower <= exact <= upper``; ``exact`` is None when not computed."""

    lower: Number
    upper: Number
    exact: Optional[Number] = None

    def holds(self) -> bool:
        if self.lower > self.upper:
            return False
        if self.exact is None:
            return True
        return self.lower <= self.exact <= self.upper

    @property
    def log10_lower(self) -> float:
        return _log10(self.lower)

    @property
    def log10_upper(self) -> float:
        return _log10(self.upper)

    def to_dict(self) -> dict:
        out = {"lower": self.lower}
        if self.exact is not None:
            out["exact"] = self.exact
        out["upper"] = self.upper
        out["log10_lower"] = self.log10_lower
        out["log10_upper"] = self.log10_upper
        return out


def log2_int(x: int) -> float:
    """log2 of a non-negative integer of any size (-inf for 0)."""
    if x < 0:
        raise ValueError("log of a negative count")
    if x == 0:
        return -math.inf
    bits = x.bit_length()
    if bits <= 1000:
        return math.log2(x)
    shift = bits - 64
    return shift + math.log2(x >> shift)


def _log10(v: Number) -> float:
    if isinstance(v, int):
        return log2_int(v) / math.log2(10) if v >= 0 else math.nan
    if v <= 0:
        return -math.inf if v == 0 else math.nan
    return math.log10(v)


@lru_cache(maxsize=None)
def _derangement_table(n: int) -> tuple[int, ...]:
    table = [1, 0]
    for j in range(2, n + 1):
        table.append((j - 1) * (table[-1] + table[-2]))
    return tuple(table[: n + 1])


def derangements(n: int) -> int:
    """``!n`` via ``!n = (n-1)(!(n-1) + !(n-2))``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _derangement_table(max(n, 1))[n]


def count_fixed_point_perms(n: int, m: int) -> int:
    """Number of permutations of [1, n] with exactly ``m`` fixed points."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    return math.comb(n, m) * derangements(n - m)


def fixed_point_count_bounds(n: int, m: int) -> CountBounds:
    """``n!/(m!(n-m)) <= N_m <= n^(n-m)``.

    The lower form counts permutations whose non-fixed points form a single
    cycle, so it only applies for ``n - m >= 2``.  At ``m = n`` it is 1 and
    at ``m = n - 1`` it is 0, both equal to the exact count.
    """
    exact = count_fixed_point_perms(n, m)
    if m == n:
        lower = 1
    elif m == n - 1:
        lower = 0
    else:
        # n!/(m!(n-m)) = C(n, m) (n-m-1)!, an integer
        lower = math.comb(n, m) * math.factorial(n - m - 1)
    return CountBounds(lower=lower, exact=exact, upper=n ** (n - m))


def _normalized(count: int, n: int) -> float:
    if count == 0:
        return -math.inf
    if count == 1:
        return 0.0
    return log2_int(count) / (n * math.log2(n))


def normalized_log_fixed_count(n: int, m: int) -> float:
    """``log N_m / (n log n)``; tends to ``1 - m/n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return _normalized(count_fixed_point_perms(n, m), n)


def _check_guard(what: str, n: int, k: int) -> None:
    size = math.factorial(n) ** (k - 1)
    if size > ENUMERATION_GUARD:
        raise InfeasibleEnumeration(what, size, ENUMERATION_GUARD)


def _feasible(n: int, k: int) -> bool:
    return math.factorial(n) ** (k - 1) <= ENUMERATION_GUARD


@lru_cache(maxsize=8)
def _perm_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    images = np.array(list(permutations(range(n))), dtype=np.int16).reshape(-1, n)
    inverses = np.argsort(images, axis=1).astype(np.int16)
    return images, inverses


def _tuple_chunks(n_perms: int, slots: int, chunk: int = 1 << 16):
    total = n_perms**slots
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield np.stack(np.unravel_index(flat, (n_perms,) * slots), axis=1)


def exact_kfold_derangements(n: int, k: int) -> int:
    """``d_k(n)`` by enumerating ``(pi_2, ..., pi_k)`` with ``pi_1 = id``
    and keeping tuples whose images differ pointwise."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n == 0 or k == 1:
        return 1
    _check_guard("k-fold derangements", n, k)
    images, _ = _perm_arrays(n)
    ident = np.arange(n, dtype=np.int16)
    total = 0
    for idx in _tuple_chunks(len(images), k - 1):
        rows = [np.broadcast_to(ident, (len(idx), n))] + [images[idx[:, s]] for s in range(k - 1)]
        ok = np.ones(len(idx), dtype=bool)
        for a, b in combinations(range(k), 2):
            ok &= np.all(rows[a] != rows[b], axis=1)
        total += int(ok.sum())
    return total


def kfold_bounds(n: int, k: int) -> CountBounds:
    """``((n-k+1)!)^(k-1) <= d_k(n) <= (!n)^(k-1)``; exact when enumerable."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    lower = math.factorial(n - k + 1) ** (k - 1)
    upper = derangements(n) ** (k - 1)
    exact = exact_kfold_derangements(n, k) if _feasible(n, k) else None
    return CountBounds(lower=lower, exact=exact, upper=upper)


@lru_cache(maxsize=32)
def _bell_table(n: int, k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    images, inverses = _perm_arrays(n)
    b = bell_number(k)
    ident = np.arange(n, dtype=np.int16)
    hist: Counter = Counter()
    for idx in _tuple_chunks(len(images), k - 1):
        pre = np.empty((len(idx), k, n), dtype=np.int16)
        pre[:, 0, :] = ident
        for s in range(k - 1):
            pre[:, s + 1, :] = inverses[idx[:, s]]
        codes = correspondence_codes(pre) - 1
        counts = np.zeros((len(idx), b), dtype=np.int64)
        np.add.at(counts, (np.arange(len(idx))[:, None], codes), 1)
        rows, freq = np.unique(counts, axis=0, return_counts=True)
        for row, f in zip(rows, freq):
            hist[tuple(int(v) for v in row)] += int(f)
    return tuple(sorted(hist.items()))


def bell_count_table(n: int, k: int) -> dict[tuple[int, ...], int]:
    """Number of vectors ``(id, pi_2, ..., pi_k)`` per realised signature."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if k == 1:
        return {(n,): 1}
    _check_guard("Bell permutation vectors", n, k)
    return dict(_bell_table(n, k))


def exact_bell_count(n: int, k: int, sig: BellSignature) -> int:
    if sig.k != k or sig.n != n:
        raise ValueError(f"signature is for (n={sig.n}, k={sig.k}), asked for (n={n}, k={k})")
    return bell_count_table(n, k).get(sig.counts, 0)


def multinomial(n: int, parts) -> int:
    parts = list(parts)
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def _d_lower(s: int, i: int) -> tuple[int, bool]:
    """``d_s(i)`` and whether the value is exact.

    Falls back to the closed-form lower bound ``((i-s+1)!)^(s-1)`` when the
    enumeration is too large.
    """
    if s == 1 or i == 0:
        return 1, True
    if s > i:
        return 0, True
    if s == 2:
        return derangements(i), True
    if _feasible(i, s):
        return exact_kfold_derangements(i, s), True
    return math.factorial(i - s + 1) ** (s - 1), False


def bell_count_bounds(n: int, k: int, sig: BellSignature) -> CountBounds:
    """Multinomial sandwich on the number of ``sig``-Bell vectors."""
    if sig.k != k or sig.n != n:
        raise ValueError(f"signature is for (n={sig.n}, k={sig.k}), asked for (n={n}, k={k})")
    parts = enumerate_partitions(k)
    coeff = multinomial(n, sig.counts)
    lower = coeff
    for part, count in zip(parts, sig.counts):
        lower *= _d_lower(len(part), count)[0]
    spread = sum(len(part) * count for part, count in zip(parts, sig.counts)) - n
    upper = coeff * n**spread
    exact = exact_bell_count(n, k, sig) if _feasible(n, k) else None
    return CountBounds(lower=lower, exact=exact, upper=upper)


def normalized_log_bell_count(n: int, k: int, sig: BellSignature) -> CountBounds:
    """``log N / (n log n)`` for the Bell count and its two bounds.

    ``exact`` is None when enumeration is infeasible; ``lower``/``upper`` are
    the normalised closed-form bounds.
    """
    b = bell_count_bounds(n, k, sig)
    exact = None if b.exact is None else _normalized(b.exact, n)
    return CountBounds(lower=_normalized(b.lower, n), exact=exact, upper=_normalized(b.upper, n))


def bell_rate_target(k: int, weights) -> float:
    """Limit ``sum_j |P_j| alpha_j - 1`` for signature fractions ``alpha``."""
    parts = enumerate_partitions(k)
    weights = list(weights)
    if len(weights) != len(parts):
        raise ValueError("one weight per partition slot")
    return sum(len(p) * a for p, a in zip(parts, weights)) - 1.0


def unrestricted_multiplier(n: int) -> int:
    """Factor between vector counts with ``pi_1`` free and ``pi_1 = id``."""
    return math.factorial(n)
