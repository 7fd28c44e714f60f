"""Exact and Monte Carlo probabilities that permuted i.i.d. samples are
typical, and the harness that checks cycle-type invariance and every bound.

An outcome is the list of ``n`` i.i.d. columns drawn from the joint
distribution; coordinate ``l`` of the sample is then permuted by ``pi_l``
(``z[i] = x[pi_l(i)]``) before the typicality test.

Randomness is counter based: trial ``t`` of a run with seed ``s`` draws from
a Philox stream keyed by ``s`` whose counter starts at ``t * 2**64``.  A
trial's sample therefore depends only on ``(s, t)``, so results do not
change with the number of workers or the order trials run in.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import (
    BoundReport,
    lemma4_applies,
    lemma4_bound,
    lemma5_applies,
    lemma5_bound,
    theorem1_bound,
    theorem2_bound,
)
from .dist import JointDistribution, dsbs
from .errors import InfeasibleEnumeration
from .partitions import PermutationVector, bell_signature
from .perm_core import (
    Permutation,
    all_permutations,
    compose,
    cycle_type,
    identity,
    inverse,
    random_permutation,
    standard_permutation,
)
from .typicality import SequenceSample, as_rational, count_window, within_window

__all__ = [
    "OUTCOME_GUARD",
    "DISCREPANCY_TOL",
    "TrialConfig",
    "EstimateReport",
    "trial_generator",
    "sample_iid",
    "typical_mask",
    "exact_typicality_prob",
    "estimate_typicality_prob",
    "typicality_probability",
    "Prop1Report",
    "verify_proposition1",
    "BoundCase",
    "SweepRow",
    "SweepReport",
    "verify_bounds",
    "correlated_binary_triple",
    "near_repetition_triple",
    "theorem1_suite",
    "lemma4_suite",
    "lemma5_suite",
    "theorem2_suite",
    "default_suite",
    "SUITES",
]

log = logging.getLogger(__name__)

OUTCOME_GUARD = 10**7
DISCREPANCY_TOL = 1e-12
_CHUNK = 1 << 15
_TRIAL_CHUNK = 2048
_KEY_MASK = (1 << 128) - 1


@dataclass(frozen=True)
class TrialConfig:
    distribution: JointDistribution
    permutations: PermutationVector
    n: int
    eps: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.permutations.n != self.n:
            raise ValueError(f"permutations act on {self.permutations.n} points, n={self.n}")
        if self.permutations.k != self.distribution.k:
            raise ValueError(
                f"{self.permutations.k} permutations for a {self.distribution.k}-coordinate distribution"
            )
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")


@dataclass(frozen=True)
class EstimateReport:
    p_hat: float
    stderr: float
    trials: int
    hits: int
    exact: Optional[float] = None
    bound: Optional[BoundReport] = None

    @classmethod
    def from_hits(cls, hits: int, trials: int, **kw) -> "EstimateReport":
        p = hits / trials
        return cls(p_hat=p, stderr=math.sqrt(p * (1.0 - p) / trials), trials=trials, hits=hits, **kw)

    def to_dict(self) -> dict:
        out = {"p_hat": self.p_hat, "stderr": self.stderr, "trials": self.trials, "hits": self.hits}
        if self.exact is not None:
            out["exact"] = self.exact
        if self.bound is not None:
            out["bound"] = self.bound.to_dict()
        return out


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Independent counter-based stream for one trial."""
    bitgen = np.random.Philox(key=int(seed) & _KEY_MASK, counter=[0, int(trial), 0, 0])
    return np.random.Generator(bitgen)


def _draw_cells(d: JointDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(d.probs.ravel())
    u = rng.random(n) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), d.n_cells - 1)


def sample_iid(d: JointDistribution, n: int, rng: np.random.Generator) -> SequenceSample:
    """``n`` i.i.d. columns from ``d``; row ``l`` is coordinate ``l + 1``."""
    cells = _draw_cells(d, n, rng)
    return SequenceSample(np.array(np.unravel_index(cells, d.alphabet_sizes)), d.alphabet_sizes)


def typical_mask(
    cells: np.ndarray, d: JointDistribution, pv: PermutationVector, eps: float
) -> np.ndarray:
    """Typicality of each permuted outcome.

    ``cells`` has shape ``(T, n)``: flat cell index of every unpermuted column.
    """
    T, n = cells.shape
    sizes = d.alphabet_sizes
    rows = np.unravel_index(cells, sizes)
    permuted = tuple(r[:, p.as_array()] for r, p in zip(rows, pv))
    new_cells = np.ravel_multi_index(permuted, sizes)
    C = d.n_cells
    flat = (new_cells + C * np.arange(T)[:, None]).ravel()
    counts = np.bincount(flat, minlength=T * C).reshape(T, C)
    lo, hi = count_window(d, eps, n)
    return within_window(counts, lo, hi)


def _check_pv(d: JointDistribution, pv: PermutationVector, n: int) -> None:
    if pv.n != n:
        raise ValueError(f"permutations act on {pv.n} points, n={n}")
    if pv.k != d.k:
        raise ValueError(f"{pv.k} permutations for a {d.k}-coordinate distribution")


def exact_typicality_prob(d: JointDistribution, pv: PermutationVector, n: int, eps: float) -> float:
    """Sum of outcome probabilities over all ``C^n`` outcomes that are
    typical after permutation (compensated summation, fixed chunk order,
    clipped to 1)."""
    _check_pv(d, pv, n)
    C = d.n_cells
    total = C**n
    if total > OUTCOME_GUARD:
        raise InfeasibleEnumeration("typicality outcomes", total, OUTCOME_GUARD)
    if as_rational(eps) >= 1:
        # every frequency deviation is at most 1
        return 1.0
    p_flat = d.probs.ravel()
    powers = C ** np.arange(n - 1, -1, -1, dtype=np.int64)
    partial = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        cells = (idx[:, None] // powers) % C
        mask = typical_mask(cells, d, pv, eps)
        if mask.any():
            probs = np.prod(p_flat[cells[mask]], axis=1)
            partial.append(math.fsum(probs))
    return min(1.0, math.fsum(partial))


def _count_hits(args) -> int:
    d, pv, n, eps, seed, start, stop = args
    cells = np.empty((stop - start, n), dtype=np.int64)
    for j, t in enumerate(range(start, stop)):
        cells[j] = _draw_cells(d, n, trial_generator(seed, t))
    return int(typical_mask(cells, d, pv, eps).sum())


def estimate_typicality_prob(cfg: TrialConfig, workers: int = 1) -> EstimateReport:
    """Monte Carlo estimate; identical for any ``workers`` given the seed."""
    d, pv = cfg.distribution, cfg.permutations
    jobs = [
        (d, pv, cfg.n, cfg.eps, cfg.seed, a, min(a + _TRIAL_CHUNK, cfg.trials))
        for a in range(0, cfg.trials, _TRIAL_CHUNK)
    ]
    if workers <= 1:
        hits = sum(map(_count_hits, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_count_hits, jobs))
    return EstimateReport.from_hits(hits, cfg.trials)


def typicality_probability(
    d: JointDistribution,
    pv: PermutationVector,
    n: int,
    eps: float,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> EstimateReport:
    """Exact value when enumerable, otherwise a Monte Carlo estimate."""
    try:
        exact = exact_typicality_prob(d, pv, n, eps)
    except InfeasibleEnumeration as exc:
        log.warning("%s; falling back to Monte Carlo with %d trials", exc, trials)
        return estimate_typicality_prob(TrialConfig(d, pv, n, eps, trials, seed), workers)
    return EstimateReport(p_hat=exact, stderr=0.0, trials=0, hits=0, exact=exact)


# -- cycle-type invariance ---------------------------------------------------


@dataclass(frozen=True)
class Prop1Report:
    n: int
    eps: float
    same_permutation: float
    cycle_type_class: float
    reduction: float
    classes: dict = field(default_factory=dict)
    tol: float = DISCREPANCY_TOL

    @property
    def max_discrepancy(self) -> float:
        return max(self.same_permutation, self.cycle_type_class, self.reduction)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= self.tol

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        op = "<=" if self.passed else ">"
        return (
            f"{verdict}, max discrepancy {self.max_discrepancy:.3e} {op} {self.tol:g} "
            f"(i: {self.same_permutation:.3e}, ii: {self.cycle_type_class:.3e}, "
            f"iii: {self.reduction:.3e})"
        )


def verify_proposition1(
    d: JointDistribution, n: int, eps: float, pairs: int = 20, seed: int = 0
) -> Prop1Report:
    """Check by exact enumeration that

    (i) permuting both sequences by the same permutation keeps the
        probability;
    (ii) ``P((X, pi Y) typical)`` is constant over each cycle-type class of
         S_n and equals the value at the standard permutation;
    (iii) ``P((pi_x X, pi_y Y))`` equals the value at the standard
          permutation of the type of ``pi_x^{-1} pi_y``.
    """
    if d.k != 2:
        raise ValueError("the pair statement needs a 2-coordinate distribution")
    ident = identity(n)
    base = exact_typicality_prob(d, PermutationVector.of(ident, ident), n, eps)
    rng = np.random.default_rng(seed)

    every = math.factorial(n) <= 720
    sigmas = list(all_permutations(n)) if every else [random_permutation(n, rng) for _ in range(pairs)]
    same = max(
        abs(exact_typicality_prob(d, PermutationVector.of(s, s), n, eps) - base) for s in sigmas
    )

    standard_cache: dict = {}

    def at_standard(ct) -> float:
        if ct not in standard_cache:
            std = standard_permutation(ct)
            standard_cache[ct] = exact_typicality_prob(d, PermutationVector.pair(std), n, eps)
        return standard_cache[ct]

    spread = 0.0
    classes: dict = {}
    perms = all_permutations(n) if every else (random_permutation(n, rng) for _ in range(pairs))
    for p in perms:
        ct = cycle_type(p)
        value = exact_typicality_prob(d, PermutationVector.pair(p), n, eps)
        lo, hi = classes.get(ct, (value, value))
        classes[ct] = (min(lo, value), max(hi, value))
        spread = max(spread, abs(value - at_standard(ct)))

    reduction = 0.0
    for _ in range(pairs):
        px, py = random_permutation(n, rng), random_permutation(n, rng)
        lhs = exact_typicality_prob(d, PermutationVector.of(px, py), n, eps)
        rhs = at_standard(cycle_type(compose(inverse(px), py)))
        reduction = max(reduction, abs(lhs - rhs))

    return Prop1Report(
        n=n,
        eps=float(eps),
        same_permutation=same,
        cycle_type_class=spread,
        reduction=reduction,
        classes={str(ct): v for ct, v in classes.items()},
    )


# -- bound soundness sweeps --------------------------------------------------


@dataclass(frozen=True)
class BoundCase:
    config_id: str
    distribution: JointDistribution
    permutations: PermutationVector
    eps: float
    bound: BoundReport
    label: str = ""

    @property
    def n(self) -> int:
        return self.permutations.n


@dataclass(frozen=True)
class SweepRow:
    config_id: str
    n: int
    label: str
    eps: float
    exact: Optional[float]
    p_hat: Optional[float]
    stderr: Optional[float]
    bound: float

    @property
    def observed(self) -> float:
        if self.exact is not None:
            return self.exact
        return self.p_hat + 3.0 * self.stderr

    @property
    def margin(self) -> float:
        return self.bound - self.observed

    @property
    def violated(self) -> bool:
        return self.margin < 0


CSV_COLUMNS = ["config_id", "n", "m_or_signature", "epsilon", "exact", "p_hat", "stderr", "bound", "margin"]
CSV_HEADER = "# permtypical sweep v1"


@dataclass
class SweepReport:
    rows: list

    @property
    def violations(self) -> list:
        return [r for r in self.rows if r.violated]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.rows), default=math.inf)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.config_id, r.n, r.label, repr(r.eps),
                "" if r.exact is None else repr(r.exact),
                "" if r.p_hat is None else repr(r.p_hat),
                "" if r.stderr is None else repr(r.stderr),
                repr(r.bound), repr(r.margin),
            ])
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"{'config':<28}{'n':>3}  {'m/sig':<14}{'eps':>6}{'observed':>12}{'bound':>12}{'margin':>12}"]
        for r in self.rows:
            flag = "  VIOLATION" if r.violated else ""
            lines.append(
                f"{r.config_id:<28}{r.n:>3}  {r.label:<14}{r.eps:>6g}{r.observed:>12.4e}"
                f"{r.bound:>12.4e}{r.margin:>12.4e}{flag}"
            )
        lines.append(f"{len(self.rows)} configurations, {len(self.violations)} violations")
        return "\n".join(lines)


def verify_bounds(cases: Iterable[BoundCase], trials: int = 100_000, seed: int = 0,
                  workers: int = 1) -> SweepReport:
    """Exact probability (or ``p_hat + 3 stderr``) against each explicit bound."""
    rows = []
    for case in cases:
        est = typicality_probability(case.distribution, case.permutations, case.n, case.eps,
                                     trials=trials, seed=seed, workers=workers)
        rows.append(SweepRow(
            config_id=case.config_id,
            n=case.n,
            label=case.label,
            eps=float(case.eps),
            exact=est.exact,
            p_hat=None if est.exact is not None else est.p_hat,
            stderr=None if est.exact is not None else est.stderr,
            bound=case.bound.explicit_bound,
        ))
    return SweepReport(rows)


def correlated_binary_triple(p: float = 0.1, q: float = 0.2) -> JointDistribution:
    """Binary Markov chain ``X1 -> X2 -> X3``: uniform ``X1``, each link flips
    with probability ``p`` then ``q``.  Full support for ``0 < p, q < 1``."""
    flip1 = np.array([[1 - p, p], [p, 1 - p]])
    flip2 = np.array([[1 - q, q], [q, 1 - q]])
    table = 0.5 * flip1[:, :, None] * flip2[None, :, :]
    return JointDistribution(table)


def near_repetition_triple() -> JointDistribution:
    """Full-support binary triple with mass 0.4 on each of 000 and 111.

    At n = 4 and eps = 0.1 the type with two 000 and two 111 columns is
    typical, so exact probabilities are non-zero.
    """
    table = np.empty((2, 2, 2))
    table[0, 0, 0] = table[1, 1, 1] = 0.4
    table[0, 0, 1] = table[1, 1, 0] = 0.05
    table[0, 1, 0] = table[1, 0, 1] = 0.03
    table[0, 1, 1] = table[1, 0, 0] = 0.02
    return JointDistribution(table)


def _dists(dists):
    if dists is None:
        return {"dsbs0.1": dsbs(0.1), "dsbs0.2": dsbs(0.2)}
    return dict(dists)


def theorem1_suite(dists=None, ns: Sequence[int] = (1, 2, 3, 4, 5), eps=(0.05, 0.1)) -> list:
    """Every permutation of [1, n], bounded by its fixed-point count."""
    cases = []
    for name, d in _dists(dists).items():
        for n in ns:
            for e in eps:
                for p in all_permutations(n):
                    ct = cycle_type(p)
                    cases.append(BoundCase(
                        config_id=f"thm1/{name}/n{n}/eps{e}",
                        distribution=d, permutations=PermutationVector.pair(p), eps=e,
                        bound=theorem1_bound(n, ct.m, d, e),
                        label=f"m={ct.m}:{''.join(map(str, p.image))}",
                    ))
    return cases


def lemma4_suite(dists=None, ns: Sequence[int] = (4, 5, 6), eps=(0.0, 0.1)) -> list:
    """Every single n-cycle."""
    cases = []
    for name, d in _dists(dists).items():
        for n in ns:
            for e in eps:
                bound = lemma4_bound(n, d, e)
                for p in all_permutations(n):
                    if lemma4_applies(cycle_type(p)):
                        cases.append(BoundCase(
                            config_id=f"lemma4/{name}/n{n}/eps{e}",
                            distribution=d, permutations=PermutationVector.pair(p), eps=e,
                            bound=bound, label="".join(map(str, p.image)),
                        ))
    return cases


def lemma5_suite(dists=None, ns: Sequence[int] = (4, 6), ss: Sequence[int] = (3, 4),
                 eps=(0.0, 0.05, 0.1)) -> list:
    """Derangements whose cycles are all shorter than ``s``."""
    cases = []
    for name, d in _dists(dists).items():
        for n in ns:
            perms = list(all_permutations(n))
            for s in ss:
                for e in eps:
                    bound = lemma5_bound(n, s, d, e)
                    for p in perms:
                        ct = cycle_type(p)
                        if lemma5_applies(ct, s):
                            cases.append(BoundCase(
                                config_id=f"lemma5/{name}/n{n}/s{s}/eps{e}",
                                distribution=d, permutations=PermutationVector.pair(p), eps=e,
                                bound=bound, label="c=" + "+".join(map(str, ct.lengths)),
                            ))
    return cases


def theorem2_suite(d: Optional[JointDistribution] = None, n: int = 4, eps=(0.05, 0.1)) -> list:
    """Every vector ``(id, pi_2, pi_3)`` on [1, n] for a binary triple."""
    d = near_repetition_triple() if d is None else d
    ident = identity(n)
    perms = list(all_permutations(n))
    cases = []
    for e in eps:
        for p2 in perms:
            for p3 in perms:
                pv = PermutationVector.of(ident, p2, p3)
                sig = bell_signature(pv)
                cases.append(BoundCase(
                    config_id=f"thm2/triple/n{n}/eps{e}",
                    distribution=d, permutations=pv, eps=e,
                    bound=theorem2_bound(n, sig, d, e),
                    label=str(sig),
                ))
    return cases


def default_suite() -> list:
    return theorem1_suite() + lemma4_suite() + lemma5_suite() + theorem2_suite()


SUITES = {
    "thm1": theorem1_suite,
    "lemma4": lemma4_suite,
    "lemma5": lemma5_suite,
    "thm2": theorem2_suite,
    "default": default_suite,
}
