"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 an exhaustive enumeration was asked for beyond its guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bounds, counting, montecarlo
from .dist import JointDistribution, dsbs, load_distribution
from .errors import InfeasibleEnumeration
from .partitions import PermutationVector, bell_number, bell_signature, parse_signature
from .perm_core import (
    CycleType,
    Permutation,
    cycle_decompose,
    fixed_points,
    format_cycles,
    identity,
    is_derangement,
    parse_cycles,
    parse_image,
    random_with_cycle_type,
    standard_from_lengths,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("permtypical")


class ConfigError(ValueError):
    pass


# -- parsing helpers -----------------------------------------------------------


def parse_dist(spec) -> JointDistribution:
    """``dsbs:<p>``, a JSON file path, or an already-decoded JSON object."""
    if isinstance(spec, dict):
        return JointDistribution.from_dict(spec)
    spec = str(spec)
    if spec.startswith("dsbs:"):
        try:
            return dsbs(float(spec[5:]))
        except ValueError as exc:
            raise ConfigError(f"bad distribution {spec!r}: {exc}") from None
    try:
        return load_distribution(spec)
    except FileNotFoundError:
        raise ConfigError(f"distribution file {spec!r} not found") from None
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"invalid distribution {spec!r}: {exc}") from None


def parse_cycle_type(text: str) -> tuple[int, list[int]]:
    """``"m=2,c=2,lengths=3,2"`` -> ``(2, [3, 2])``; cycle order is kept."""
    m = c = None
    lengths: list[int] = []
    in_lengths = False
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            if tok.startswith("m="):
                m, in_lengths = int(tok[2:]), False
            elif tok.startswith("c="):
                c, in_lengths = int(tok[2:]), False
            elif tok.startswith("lengths="):
                in_lengths = True
                if tok[8:]:
                    lengths.append(int(tok[8:]))
            elif in_lengths:
                lengths.append(int(tok))
            else:
                raise ValueError
        except ValueError:
            raise ConfigError(f"bad token {tok!r} in cycle type {text!r}") from None
    if m is None:
        raise ConfigError(f"cycle type {text!r} is missing m=")
    if c is not None and c != len(lengths):
        raise ConfigError(f"cycle type says c={c} but lists {len(lengths)} lengths")
    if any(v < 2 for v in lengths):
        raise ConfigError("cycle lengths must be at least 2")
    return m, lengths


def parse_perm_spec(text: str, n: Optional[int] = None, rng=None) -> Permutation:
    """``image:5 1 4 3 2``, ``cycles:(1 2 5)(3 4)``, ``type:m=..,lengths=..``,
    ``random-type:m=..,lengths=..``; a bare string is read as cycles if it
    contains ``(`` and as an image otherwise."""
    kind, _, body = text.partition(":")
    if not _:
        kind, body = ("cycles" if "(" in text else "image"), text
    try:
        if kind == "image":
            p = parse_image(body)
        elif kind == "cycles":
            p = parse_cycles(body, n)
        elif kind in ("type", "random-type"):
            m, lengths = parse_cycle_type(body)
            p = standard_from_lengths(lengths, m)
            if kind == "random-type":
                rng = rng if rng is not None else np.random.default_rng(0)
                p = random_with_cycle_type(CycleType.of(m, lengths), rng)
        else:
            raise ConfigError(f"unknown permutation kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if n is not None and p.n != n:
        raise ConfigError(f"permutation {text!r} acts on {p.n} points, expected {n}")
    return p


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _records_out(records: list[dict], fmt: str, kind: str) -> str:
    if fmt == "json":
        if len(records) == 1:
            return json.dumps(records[0]) + "\n"
        return "".join(json.dumps(r) + "\n" for r in records)
    buf = io.StringIO()
    buf.write(f"# permtypical {kind} v1\n")
    flat = [_flatten(r) for r in records]
    cols: list[str] = []
    for r in flat:
        cols.extend(c for c in r if c not in cols)
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(_flatten(val, name + "."))
        elif isinstance(val, (list, tuple)):
            out[name] = " ".join(map(str, val))
        else:
            out[name] = val
    return out


# -- perm ----------------------------------------------------------------------


def cmd_perm(args) -> int:
    if args.perm_cmd == "standard":
        m, lengths = parse_cycle_type(args.type)
        p = standard_from_lengths(lengths, m)
        if args.format == "json":
            print(json.dumps({"image": list(p.image), "cycles": format_cycles(p, with_fixed=True)}))
        else:
            print(format_cycles(p, with_fixed=True))
        return EXIT_OK

    if args.image is not None:
        p = parse_perm_spec("image:" + args.image)
    elif args.cycles is not None:
        p = parse_perm_spec("cycles:" + args.cycles, args.n)
    else:
        raise ConfigError("give --image or --cycles")
    cycles, ct = cycle_decompose(p)
    fixed = sorted(fixed_points(p))
    if args.format == "json":
        print(json.dumps({
            "image": list(p.image),
            "cycles": format_cycles(p),
            "cycle_type": {"n": ct.n, "m": ct.m, "c": ct.c, "lengths": list(ct.lengths)},
            "fixed_points": fixed,
            "derangement": is_derangement(p),
        }))
        return EXIT_OK
    if not cycles:
        print(f"identity; m={ct.m}")
    else:
        print(f"cycles: {format_cycles(p)}")
        print(f"type: ({ct.m},{ct.c},[{','.join(map(str, ct.lengths))}])")
        print(f"fixed points: {' '.join(map(str, fixed)) if fixed else 'none'}")
        print(f"derangement: {'yes' if is_derangement(p) else 'no'}")
    return EXIT_OK


# -- count ---------------------------------------------------------------------


def cmd_count(args) -> int:
    records = []
    if args.count_cmd == "fixed":
        for n in _int_list(args.n):
            ms = range(n + 1) if args.m is None else _int_list(args.m)
            for m in ms:
                rec = {"n": n, "m": m, **counting.fixed_point_count_bounds(n, m).to_dict()}
                if args.rates:
                    rec["normalized"] = counting.normalized_log_fixed_count(n, m)
                    rec["limit"] = 1.0 - m / n
                records.append(rec)
    elif args.count_cmd == "kfold":
        for n in _int_list(args.n):
            for k in _int_list(args.k):
                records.append({"n": n, "k": k, **counting.kfold_bounds(n, k).to_dict()})
    elif args.count_cmd == "bell":
        k = args.k
        for text in args.sig:
            sig = parse_signature(text, k)
            n = sig.n if args.n is None else args.n
            if sig.n != n:
                raise ConfigError(f"signature {text!r} sums to {sig.n}, not n={n}")
            rec = {"n": n, "k": k, "signature": list(sig.counts),
                   **counting.bell_count_bounds(n, k, sig).to_dict()}
            if args.rates:
                rates = counting.normalized_log_bell_count(n, k, sig)
                rec["normalized"] = {"lower": rates.lower, "upper": rates.upper}
                if rates.exact is not None:
                    rec["normalized"]["exact"] = rates.exact
                rec["limit"] = counting.bell_rate_target(k, sig.weights())
            records.append(rec)
    _emit(_records_out(records, args.format, "count"), args.output)
    return EXIT_OK


# -- bound ---------------------------------------------------------------------


def cmd_bound(args) -> int:
    d = parse_dist(args.dist)
    records = []
    for n in _int_list(args.n):
        for eps in _float_list(args.eps):
            if args.bound_cmd == "thm1":
                ms = [n] if args.m is None else _int_list(args.m)
                for m in ms:
                    records.append(bounds.theorem1_bound(n, m, d, eps).to_dict())
            elif args.bound_cmd == "lemma4":
                records.append(bounds.lemma4_bound(n, d, eps).to_dict())
            elif args.bound_cmd == "lemma5":
                for s in _int_list(args.s):
                    records.append(bounds.lemma5_bound(n, s, d, eps).to_dict())
            elif args.bound_cmd == "thm2":
                if args.k is not None and args.k != d.k:
                    raise ConfigError(f"--k {args.k} but the distribution has k={d.k}")
                if not args.sig:
                    raise ConfigError("thm2 needs at least one --sig")
                for text in args.sig:
                    sig = parse_signature(text, d.k)
                    if sig.n != n:
                        raise ConfigError(f"signature {text!r} sums to {sig.n}, not n={n}")
                    records.append(bounds.theorem2_bound(n, sig, d, eps).to_dict())
    for rec in records:
        rec["params"]["dist"] = args.dist
    _emit(_records_out(records, args.format, "bound"), args.output)
    return EXIT_OK


# -- simulate ------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Parameters of one ``simulate`` run; flags override the JSON file."""

    dist: object = "dsbs:0.1"
    perms: list = field(default_factory=list)
    n: Optional[int] = None
    eps: float = 0.1
    trials: int = 100_000
    seed: int = 0
    workers: int = 1
    exact: bool = False
    config_id: str = "run"

    @classmethod
    def from_sources(cls, path: Optional[str], overrides: dict) -> "ExperimentConfig":
        data: dict = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path!r}: {exc}") from None
            unknown = set(data) - set(cls.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        if self.eps < 0:
            raise ConfigError("eps must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not self.perms:
            raise ConfigError("give at least one --perm")

    def build(self) -> montecarlo.TrialConfig:
        d = parse_dist(self.dist)
        rng = np.random.default_rng(self.seed)
        perms = [parse_perm_spec(s, self.n, rng) for s in self.perms]
        n = perms[0].n if self.n is None else self.n
        if len(perms) == d.k - 1:
            perms = [identity(n)] + perms
        try:
            pv = PermutationVector(tuple(perms))
            return montecarlo.TrialConfig(d, pv, n, float(self.eps), int(self.trials), int(self.seed))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _bound_for(tc: montecarlo.TrialConfig) -> bounds.BoundReport:
    pv, d = tc.permutations, tc.distribution
    sig = bell_signature(pv)
    if d.k == 2:
        return bounds.theorem1_bound(tc.n, sig.counts[1], d, tc.eps)
    return bounds.theorem2_bound(tc.n, sig, d, tc.eps)


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig.from_sources(args.config, {
        "dist": args.dist, "perms": args.perm or None, "n": args.n, "eps": args.eps,
        "trials": args.trials, "seed": args.seed, "workers": args.workers,
        "exact": True if args.exact else None, "config_id": args.config_id,
    })
    tc = cfg.build()
    est = montecarlo.estimate_typicality_prob(tc, workers=cfg.workers)
    exact = None
    if cfg.exact:
        exact = montecarlo.exact_typicality_prob(tc.distribution, tc.permutations, tc.n, tc.eps)
    bound = _bound_for(tc)
    if args.format == "json":
        rec = montecarlo.EstimateReport.from_hits(est.hits, est.trials, exact=exact, bound=bound).to_dict()
        rec["params"] = {"config_id": cfg.config_id, "n": tc.n, "eps": tc.eps, "seed": tc.seed,
                         "perms": [" ".join(map(str, p.image)) for p in tc.permutations]}
        _emit(json.dumps(rec) + "\n", args.output)
        return EXIT_OK
    buf = io.StringIO()
    buf.write("# permtypical estimate v1\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config_id", "n", "signature", "epsilon", "trials", "seed", "hits",
                     "p_hat", "stderr", "exact", "bound"])
    writer.writerow([cfg.config_id, tc.n, str(bell_signature(tc.permutations)), repr(tc.eps),
                     est.trials, tc.seed, est.hits, repr(est.p_hat), repr(est.stderr),
                     "" if exact is None else repr(exact), repr(bound.explicit_bound)])
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


# -- verify --------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.verify_cmd == "prop1":
        d = parse_dist(args.dist)
        ok = True
        for n in _int_list(args.n):
            for eps in _float_list(args.eps):
                rep = montecarlo.verify_proposition1(d, n, eps, pairs=args.pairs, seed=args.seed)
                print(f"n={n} eps={eps}: {rep.summary()}")
                ok &= rep.passed
        return EXIT_OK if ok else EXIT_VERIFY
    suite = montecarlo.SUITES.get(args.suite)
    if suite is None:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {sorted(montecarlo.SUITES)}")
    rep = montecarlo.verify_bounds(suite(), trials=args.trials, seed=args.seed, workers=args.workers)
    if args.output:
        _emit(rep.to_csv(), args.output)
    if args.format == "csv" and not args.output:
        sys.stdout.write(rep.to_csv())
    else:
        print(rep.table() if args.verbose else
              f"{len(rep.rows)} configurations, {len(rep.violations)} violations, "
              f"min margin {rep.min_margin:.4e}")
        for r in rep.violations:
            print(f"VIOLATION {r.config_id} {r.label}: observed {r.observed:.6e} > bound {r.bound:.6e}")
    return EXIT_OK if rep.passed else EXIT_VERIFY


# -- argument parser -----------------------------------------------------------


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # None and False defaults carry no information; skip them
    def _get_help_string(self, action):
        if action.default is None or action.default is False or action.default == [] or "default" in (action.help or ""):
            return action.help
        if action.help and re.search(r"\[[^\]]*\]$", action.help):
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog="permtypical", description=__doc__, formatter_class=fmt)
    parser.add_argument("-v", "--verbose", action="store_true", help="chatty output")
    sub = parser.add_subparsers(dest="command", required=True)

    perm = sub.add_parser("perm", help="permutation structure", formatter_class=fmt)
    psub = perm.add_subparsers(dest="perm_cmd", required=True)
    dec = psub.add_parser("decompose", help="cycles, type, fixed points", formatter_class=fmt)
    dec.add_argument("--image", help='one-line image, e.g. "5 1 4 3 2"')
    dec.add_argument("--cycles", help='cycle notation, e.g. "(1 2 5)(3 4)"')
    dec.add_argument("--n", type=int, default=None, help="domain size for --cycles")
    dec.add_argument("--format", choices=["text", "json"], default="text")
    std = psub.add_parser("standard", help="standard permutation of a cycle type", formatter_class=fmt)
    std.add_argument("--type", required=True, help='e.g. "m=2,c=2,lengths=3,2"')
    std.add_argument("--format", choices=["text", "json"], default="text")

    count = sub.add_parser("count", help="counting sandwiches", formatter_class=fmt)
    csub = count.add_subparsers(dest="count_cmd", required=True)
    fixed = csub.add_parser("fixed", help="permutations with m fixed points", formatter_class=fmt)
    fixed.add_argument("--n", required=True, help="n or comma list")
    fixed.add_argument("--m", default=None, help="m or comma list (default: all)")
    kf = csub.add_parser("kfold", help="k-fold derangements", formatter_class=fmt)
    kf.add_argument("--n", required=True, help="n or comma list")
    kf.add_argument("--k", required=True, help="k or comma list")
    bell = csub.add_parser("bell", help="Bell permutation vectors", formatter_class=fmt)
    bell.add_argument("--n", type=int, default=None, help="n (default: signature sum)")
    bell.add_argument("--k", type=int, required=True)
    bell.add_argument("--sig", action="append", required=True, help='signature, e.g. "4,0"')
    for p in (fixed, kf, bell):
        p.add_argument("--rates", action="store_true", help="add normalised log counts")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--output", default=None, help="write to file instead of stdout")

    bound = sub.add_parser("bound", help="typicality probability bounds", formatter_class=fmt)
    bsub = bound.add_subparsers(dest="bound_cmd", required=True)
    for name, helptext in [("thm1", "any permutation, by fixed-point count"),
                           ("lemma4", "single n-cycle"),
                           ("lemma5", "derangements with short cycles"),
                           ("thm2", "Bell permutation vectors")]:
        b = bsub.add_parser(name, help=helptext, formatter_class=fmt)
        b.add_argument("--dist", default="dsbs:0.1", help="JSON file or dsbs:<p>")
        b.add_argument("--n", required=True, help="n or comma list")
        b.add_argument("--eps", default="0.0", help="eps or comma list")
        b.add_argument("--format", choices=["json", "csv"], default="json")
        b.add_argument("--output", default=None)
        if name == "thm1":
            b.add_argument("--m", default=None, help="fixed points or comma list (default: n)")
        if name == "lemma5":
            b.add_argument("--s", default="3", help="cycle-length cap or comma list")
        if name == "thm2":
            b.add_argument("--k", type=int, default=None, help="checked against the distribution")
            b.add_argument("--sig", action="append", default=[], help='signature, e.g. "96,4"')

    sim = sub.add_parser("simulate", help="Monte Carlo typicality estimate", formatter_class=fmt)
    sim.add_argument("--config", default=None, help="JSON ExperimentConfig; flags override it")
    sim.add_argument("--dist", default=None, help="JSON file or dsbs:<p> [dsbs:0.1]")
    sim.add_argument("--perm", action="append", default=[],
                     help="image:/cycles:/type:/random-type: spec; one per sequence, "
                          "or one fewer (the first is then the identity)")
    sim.add_argument("--n", type=int, default=None, help="length (default: from --perm)")
    sim.add_argument("--eps", type=float, default=None, help="typicality slack [0.1]")
    sim.add_argument("--trials", type=int, default=None, help="[100000]")
    sim.add_argument("--seed", type=int, default=None, help="[0]")
    sim.add_argument("--workers", type=int, default=None, help="[1]")
    sim.add_argument("--exact", action="store_true", help="also enumerate the exact value")
    sim.add_argument("--config-id", default=None, help="row label [run]")
    sim.add_argument("--format", choices=["csv", "json"], default="csv")
    sim.add_argument("--output", default=None)

    ver = sub.add_parser("verify", help="invariance and soundness checks", formatter_class=fmt)
    vsub = ver.add_subparsers(dest="verify_cmd", required=True)
    p1 = vsub.add_parser("prop1", help="cycle-type invariance by exact enumeration", formatter_class=fmt)
    p1.add_argument("--dist", default="dsbs:0.1")
    p1.add_argument("--n", required=True, help="n or comma list")
    p1.add_argument("--eps", default="0.1", help="eps or comma list")
    p1.add_argument("--pairs", type=int, default=20, help="random (pi_x, pi_y) pairs")
    p1.add_argument("--seed", type=int, default=0)
    vb = vsub.add_parser("bounds", help="bound soundness sweep", formatter_class=fmt)
    vb.add_argument("--suite", default="default", help=f"one of {sorted(montecarlo.SUITES)}")
    vb.add_argument("--trials", type=int, default=100_000, help="Monte Carlo fallback trials")
    vb.add_argument("--seed", type=int, default=0)
    vb.add_argument("--workers", type=int, default=1)
    vb.add_argument("--format", choices=["table", "csv"], default="table")
    vb.add_argument("--output", default=None, help="also write the sweep CSV here")
    vb.add_argument("--verbose", action="store_true", help="print every row")
    return parser


COMMANDS = {
    "perm": cmd_perm,
    "count": cmd_count,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InfeasibleEnumeration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
