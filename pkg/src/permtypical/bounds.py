"""Upper bounds on the probability that permuted i.i.d. sequences are
jointly typical.

Each bound has an exponent rate ``r`` (bits per symbol) and an explicit
finite-n majorant ``min(1, F(n) * 2^(-n r))``.  The rate-form bounds for a
general permutation and for Bell permutation vectors carry a polynomial
type-counting factor ``F(n) = (n+1)^e``; the cycle-structure bounds have
``F = 1``.

Rates may be negative, in which case the explicit bound is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import (
    JointDistribution,
    kl_divergence,
    marginal,
    mixture,
    mutual_information,
    product,
    product_over_partition,
)
from .partitions import BellSignature, bell_number, enumerate_partitions
from .perm_core import CycleType

__all__ = [
    "BoundReport",
    "information_density_sum",
    "theorem1_exponent_rate",
    "theorem1_bound",
    "lemma4_delta",
    "lemma4_applies",
    "lemma4_bound",
    "lemma5_delta",
    "lemma5_applies",
    "lemma5_bound",
    "theorem2_mixture",
    "theorem2_exponent_rate",
    "theorem2_bound",
    "decreasing_from",
]


@dataclass(frozen=True)
class BoundReport:
    exponent_rate: float
    explicit_bound: float
    poly_exponent: float = 0.0
    n: int = 0
    vacuous: bool = False  # slack term infinite, only the trivial bound 1 is available
    params: dict = field(default_factory=dict)

    @property
    def log2_polynomial_factor(self) -> float:
        return self.poly_exponent * math.log2(self.n + 1)

    @property
    def polynomial_factor(self) -> float:
        try:
            return 2.0**self.log2_polynomial_factor
        except OverflowError:
            return math.inf

    def to_dict(self) -> dict:
        return {
            "exponent_rate_bits": self.exponent_rate,
            "explicit_bound": self.explicit_bound,
            "polynomial_factor": self.polynomial_factor,
            "vacuous": self.vacuous,
            "params": dict(self.params),
        }


def _explicit(n: int, rate: float, poly_exponent: float) -> float:
    if math.isnan(rate) or rate == -math.inf:
        return 1.0
    log2_value = poly_exponent * math.log2(n + 1) - n * rate
    return 2.0 ** min(0.0, log2_value)


def _require_pair(d: JointDistribution) -> None:
    if d.k != 2:
        raise ValueError(f"pair bound needs a 2-coordinate distribution, got k={d.k}")


def _check_eps(eps) -> float:
    eps = float(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return eps


def theorem1_exponent_rate(d: JointDistribution, alpha: float, eps: float) -> float:
    """``(1/4) (D(P_XY || (1-a) P_X P_Y + a P_XY) - |X||Y| eps)``."""
    _require_pair(d)
    eps = _check_eps(eps)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    indep = product(marginal(d, [1]), marginal(d, [2]))
    div = kl_divergence(d, mixture([indep, d], [1.0 - alpha, alpha]))
    return 0.25 * (div - d.n_cells * eps)


def theorem1_bound(n: int, m: int, d: JointDistribution, eps: float) -> BoundReport:
    """Bound for any permutation of [1, n] with ``m`` fixed points."""
    if not 0 <= m <= n or n < 1:
        raise ValueError(f"need 0 <= m <= n and n >= 1, got m={m}, n={n}")
    alpha = m / n
    rate = theorem1_exponent_rate(d, alpha, eps)
    poly = 4 * d.n_cells
    return BoundReport(
        exponent_rate=rate,
        explicit_bound=_explicit(n, rate, poly),
        poly_exponent=poly,
        n=n,
        params={"bound": "theorem1", "n": n, "m": m, "alpha": alpha, "eps": float(eps)},
    )


def information_density_sum(d: JointDistribution) -> float:
    """``sum_{x,y} |log2(P_XY / (P_X P_Y))|``.

    Cells with a zero marginal are skipped; a zero joint cell with positive
    marginals makes the sum infinite.
    """
    _require_pair(d)
    px = d.probs.sum(axis=1)
    py = d.probs.sum(axis=0)
    indep = np.outer(px, py)
    total = 0.0
    for cell in np.ndindex(d.probs.shape):
        if indep[cell] == 0:
            continue
        if d.probs[cell] == 0:
            return math.inf
        total += abs(math.log2(d.probs[cell] / indep[cell]))
    return total


def _delta(d: JointDistribution, eps: float, scale: float) -> float:
    eps = _check_eps(eps)
    if eps == 0:
        return 0.0
    return scale * information_density_sum(d) * eps


def lemma4_delta(d: JointDistribution, eps: float) -> float:
    return _delta(d, eps, 2.0)


def lemma5_delta(d: JointDistribution, eps: float) -> float:
    return _delta(d, eps, 1.0)


def lemma4_applies(ct: CycleType) -> bool:
    """A single n-cycle: no fixed points and one non-trivial cycle."""
    return ct.m == 0 and ct.c == 1


def lemma5_applies(ct: CycleType, s: int) -> bool:
    """No fixed points and every cycle strictly shorter than ``s``."""
    return ct.m == 0 and ct.c > 0 and max(ct.lengths) < s


def _cycle_bound(n: int, d: JointDistribution, eps: float, denom: int, delta: float, name: str,
                 **extra) -> BoundReport:
    info = mutual_information(d)
    vacuous = math.isinf(delta)
    rate = -math.inf if vacuous else (info - delta) / denom
    return BoundReport(
        exponent_rate=rate,
        explicit_bound=_explicit(n, rate, 0.0),
        n=n,
        vacuous=vacuous,
        params={"bound": name, "n": n, "eps": float(eps), "mutual_information": info,
                "delta": delta, **extra},
    )


def lemma4_bound(n: int, d: JointDistribution, eps: float) -> BoundReport:
    """``2^(-(n/2)(I - delta))`` for a single n-cycle permutation."""
    if n < 2:
        raise ValueError("a single non-trivial cycle needs n >= 2")
    return _cycle_bound(n, d, eps, 2, lemma4_delta(d, eps), "lemma4")


def lemma5_bound(n: int, s: int, d: JointDistribution, eps: float) -> BoundReport:
    """``2^(-(n/s)(I - delta))`` for derangements with all cycles shorter
    than ``s`` (see :func:`lemma5_applies`)."""
    if s < 2:
        raise ValueError("s must be at least 2")
    return _cycle_bound(n, d, eps, s, lemma5_delta(d, eps), "lemma5", s=s)


def theorem2_mixture(d: JointDistribution, sig: BellSignature) -> JointDistribution:
    """``sum_j (i_j / n) P_{X_{P_j}}``."""
    if sig.k != d.k:
        raise ValueError(f"signature for k={sig.k} but distribution has k={d.k}")
    parts = enumerate_partitions(d.k)
    comps, weights = [], []
    for part, count in zip(parts, sig.counts):
        if count:
            comps.append(product_over_partition(d, part))
            weights.append(count / sig.n)
    return mixture(comps, weights)


def theorem2_exponent_rate(d: JointDistribution, sig: BellSignature, eps: float) -> float:
    k = d.k
    if k < 2:
        raise ValueError("collections need k >= 2")
    eps = _check_eps(eps)
    div = kl_divergence(d, theorem2_mixture(d, sig))
    return (div - eps * d.n_cells) / (k * (k - 1) * bell_number(k))


def theorem2_bound(n: int, sig: BellSignature, d: JointDistribution, eps: float) -> BoundReport:
    if sig.n != n:
        raise ValueError(f"signature sums to {sig.n}, expected n={n}")
    rate = theorem2_exponent_rate(d, sig, eps)
    k = d.k
    poly = k * (k - 1) * bell_number(k) * d.n_cells
    return BoundReport(
        exponent_rate=rate,
        explicit_bound=_explicit(n, rate, poly),
        poly_exponent=poly,
        n=n,
        params={"bound": "theorem2", "n": n, "k": k, "signature": list(sig.counts),
                "eps": float(eps)},
    )


def decreasing_from(poly_exponent: float, rate: float) -> float:
    """Smallest real ``n`` past which ``(n+1)^e 2^(-n r)`` is decreasing
    (``inf`` when ``rate <= 0``)."""
    if rate <= 0:
        return math.inf
    return max(0.0, poly_exponent / (rate * math.log(2)) - 1.0)
