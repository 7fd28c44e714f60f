"""Finite joint distributions and the information measures in bits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import rel_entr

from .partitions import SetPartition

__all__ = [
    "SIMPLEX_TOL",
    "JointDistribution",
    "dsbs",
    "product",
    "marginal",
    "product_over_partition",
    "mixture",
    "kl_divergence",
    "mutual_information",
    "binary_entropy",
    "load_distribution",
]

SIMPLEX_TOL = 1e-12
_LN2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table over ``X_1 x ... x X_k``; axis ``l`` is coordinate
    ``l + 1``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim == 0:
            raise ValueError("distribution needs at least one coordinate")
        if np.any(~np.isfinite(p)):
            raise ValueError("probabilities must be finite")
        bad = np.argwhere(p < 0)
        if len(bad):
            cell = tuple(int(v) for v in bad[0])
            raise ValueError(f"negative probability {p[cell]} at cell {cell}")
        total = p.sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def k(self) -> int:
        return self.probs.ndim

    @property
    def alphabet_sizes(self) -> tuple[int, ...]:
        return tuple(self.probs.shape)

    @property
    def n_cells(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, cell):
        return float(self.probs[cell])

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.probs.shape == other.probs.shape and np.array_equal(self.probs, other.probs)

    def allclose(self, other: "JointDistribution", atol: float = SIMPLEX_TOL) -> bool:
        return self.probs.shape == other.probs.shape and np.allclose(
            self.probs, other.probs, rtol=0.0, atol=atol
        )

    def to_dict(self) -> dict:
        return {"alphabet_sizes": list(self.alphabet_sizes), "probs": self.probs.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "JointDistribution":
        probs = np.array(data["probs"], dtype=float)
        sizes = data.get("alphabet_sizes")
        if sizes is not None and tuple(sizes) != probs.shape:
            raise ValueError(f"alphabet_sizes {list(sizes)} do not match table shape {list(probs.shape)}")
        return cls(probs)

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        return cls.from_dict(json.loads(text))


def load_distribution(path: str) -> JointDistribution:
    with open(path) as fh:
        return JointDistribution.from_dict(json.load(fh))


def dsbs(p: float) -> JointDistribution:
    """Doubly symmetric binary source with crossover probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("crossover probability must lie in [0, 1]")
    return JointDistribution(np.array([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]]))


def product(*factors: JointDistribution) -> JointDistribution:
    """Independent joint distribution of the given factors, in order."""
    out = np.array(1.0)
    for f in factors:
        out = np.multiply.outer(out, f.probs)
    return JointDistribution(out)


def marginal(d: JointDistribution, coords: Sequence[int]) -> JointDistribution:
    """Marginal on the given 1-based coordinates (kept in ascending order)."""
    coords = sorted(set(int(c) for c in coords))
    if not coords:
        raise ValueError("marginal needs at least one coordinate")
    if coords[0] < 1 or coords[-1] > d.k:
        raise ValueError(f"coordinates {coords} outside [1, {d.k}]")
    drop = tuple(ax for ax in range(d.k) if ax + 1 not in coords)
    return JointDistribution(d.probs.sum(axis=drop) if drop else d.probs)


def product_over_partition(d: JointDistribution, partition: SetPartition) -> JointDistribution:
    """``prod_r P_{X_{D_r}}``: blocks of the partition become independent."""
    if partition.k != d.k:
        raise ValueError(f"partition of [1, {partition.k}] for a {d.k}-coordinate distribution")
    letters = "abcdefghijklmnopqrstuvwxyz"
    operands = []
    subscripts = []
    for block in partition.blocks:
        operands.append(marginal(d, block).probs)
        subscripts.append("".join(letters[v - 1] for v in block))
    out = letters[: d.k]
    table = np.einsum(",".join(subscripts) + "->" + out, *operands)
    return JointDistribution(table / table.sum())


def mixture(ds: Sequence[JointDistribution], weights: Sequence[float]) -> JointDistribution:
    ds = list(ds)
    w = np.asarray(weights, dtype=float)
    if len(ds) != len(w) or not ds:
        raise ValueError("need one weight per component")
    if np.any(w < 0) or abs(w.sum() - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"weights {w.tolist()} are not a probability vector")
    shape = ds[0].probs.shape
    if any(d.probs.shape != shape for d in ds):
        raise ValueError("mixture components have different shapes")
    table = sum(wi * d.probs for wi, d in zip(w, ds))
    return JointDistribution(table / table.sum())


def kl_divergence(p: JointDistribution, q: JointDistribution) -> float:
    """``D(p || q)`` in bits; ``inf`` when p is not absolutely continuous
    w.r.t. q."""
    if p.probs.shape != q.probs.shape:
        raise ValueError(f"shape mismatch {p.probs.shape} vs {q.probs.shape}")
    # rel_entr handles 0 log 0 = 0 and x log(x/0) = inf
    return float(max(rel_entr(p.probs, q.probs).sum() / _LN2, 0.0))


def mutual_information(d: JointDistribution) -> float:
    if d.k != 2:
        raise ValueError(f"mutual information is defined here for pairs, got k={d.k}")
    return kl_divergence(d, product(marginal(d, [1]), marginal(d, [2])))


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)
