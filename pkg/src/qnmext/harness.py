"""Experiment drivers behind the command line.

Every driver is deterministic in its inputs and seed: random cases draw from
``numpy.random.default_rng([seed, case_id])`` so any single case can be
reproduced (or sharded) on its own.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import random
from collections import defaultdict
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import classical, cq, oracles
from .errors import DomainError, ResourceError
from .extractors import NmExtParams, g_a_max_preimages, nmext_eval
from .field import fp_vectors
from .game import count_partitions, g_a_table, game_best_classical, set_partitions
from .mac import MacParams, mac_forgery_advantage
from .protocol import (
    AdversaryStrategy,
    IDENTITY,
    ProtocolParams,
    Source,
    rng_for,
    seed_map_adversary,
)

SLACK = 1e-9
MAX_ATOMS = 1 << 24


# -- sweep rows --------------------------------------------------------------

@dataclass
class Row:
    case_id: int
    variant: str
    lhs: float
    rhs: float
    margin: float

    @property
    def violated(self) -> bool:
        return self.margin < -SLACK


def rows_to_csv(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case_id", "variant", "lhs", "rhs", "margin"])
    for r in rows:
        writer.writerow([r.case_id, r.variant, repr(float(r.lhs)), repr(float(r.rhs)), repr(float(r.margin))])
    return buf.getvalue()


def case_rng(seed: int, case_id: int) -> np.random.Generator:
    return np.random.default_rng([seed, case_id])


# -- non-malleability scan ---------------------------------------------------

@dataclass
class ScanRow:
    index: int
    strategy: str
    structured: Fraction
    oracle: Fraction

    @property
    def match(self) -> bool:
        return self.structured == self.oracle


@dataclass
class NmScan:
    p: int
    n: int
    rows: list
    total_strategies: int
    sampled: bool
    h_min: float

    @property
    def max_distance(self) -> Fraction:
        return max(r.structured for r in self.rows)

    @property
    def mean_distance(self) -> Fraction:
        return sum((r.structured for r in self.rows), Fraction(0)) / len(self.rows)

    @property
    def all_match(self) -> bool:
        return all(r.match for r in self.rows)

    def theorem_threshold(self, eps: float) -> float:
        """Min-entropy the extractor theorem asks for at error ``eps``."""
        return (self.n / 2 + 6) * math.log2(self.p) - 1 + 4 * math.log2(1 / eps)

    def to_json(self) -> dict:
        mx = self.max_distance
        return {
            "schema": 1,
            "experiment": "nm-scan",
            "p": self.p,
            "n": self.n,
            "total_strategies": self.total_strategies,
            "sampled": self.sampled,
            "scanned": len(self.rows),
            "h_min": self.h_min,
            "source_bits": self.n * math.log2(self.p),
            "max_distance": str(mx),
            "mean_distance": str(self.mean_distance),
            "theorem_threshold_at_max": self.theorem_threshold(float(mx)) if mx else None,
            "all_match": self.all_match,
            "rows": [
                {"index": r.index, "strategy": r.strategy, "structured": str(r.structured),
                 "oracle": str(r.oracle), "match": r.match}
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "strategy", "structured", "oracle", "match"])
        for r in self.rows:
            w.writerow([r.index, r.strategy, str(r.structured), str(r.oracle), int(r.match)])
        return buf.getvalue()


def structured_nm_distance(params: NmExtParams, pmf: dict, strategy: dict) -> Fraction:
    """Build ``sigma_{Y Y' X E'}``, compute both extractor outputs, trace out ``X``."""
    seeds = list(fp_vectors(params.p, params.seed_len))
    sigma = defaultdict(Fraction)
    for (x, e), pr in pmf.items():
        for y in seeds:
            sigma[y, strategy[e][y], x, e] += pr / len(seeds)
    joint = defaultdict(Fraction)
    for (y, yp, x, e), pr in sigma.items():
        joint[nmext_eval(params, x, y), nmext_eval(params, x, yp), y, yp, e] += pr
    rest = defaultdict(Fraction)
    for (z, zp, y, yp, e), pr in joint.items():
        rest[zp, y, yp, e] += pr
    total = Fraction(0)
    for (zp, y, yp, e), pr in rest.items():
        for z in range(params.p):
            total += abs(joint.get((z, zp, y, yp, e), Fraction(0)) - pr / params.p)
    return total / 2


def _strategies(seeds, sides):
    per_seed = [[s for s in seeds if s != y] for y in seeds]
    per_side = list(itertools.product(*per_seed))
    for combo in itertools.product(per_side, repeat=len(sides)):
        yield {e: dict(zip(seeds, choice)) for e, choice in zip(sides, combo)}


def _describe(strategy, seeds) -> str:
    parts = []
    for e, f in strategy.items():
        image = ",".join("".join(map(str, f[y])) for y in seeds)
        parts.append(f"{e}:{image}")
    return ";".join(parts)


def nm_distance_scan(
    p: int,
    n: int,
    source: Source,
    max_strategies: int = 1 << 16,
    sample: int | None = None,
    seed: int = 0,
) -> NmScan:
    """Exact non-malleability distance for every fixed-point-free tampering map.

    One deterministic map ``f_e`` per side-information value; mixtures need
    not be scanned because the distance is convex in the strategy.  When the
    strategy count exceeds ``max_strategies`` a seeded sample of ``sample``
    maps is scanned instead (or ``ResourceError`` if no sample is requested).
    """
    params = NmExtParams(p, n)
    seeds = list(fp_vectors(p, params.seed_len))
    sides = sorted({e for (_, e) in source.pmf}, key=repr)
    total = (len(seeds) - 1) ** (len(seeds) * len(sides))
    if total <= max_strategies:
        chosen = list(enumerate(_strategies(seeds, sides)))
        sampled = False
    elif sample:
        rng = random.Random(seed)
        chosen = []
        for i in range(sample):
            strat = {e: {y: rng.choice([s for s in seeds if s != y]) for y in seeds} for e in sides}
            chosen.append((i, strat))
        sampled = True
    else:
        raise ResourceError(f"{total} tampering maps exceed the limit {max_strategies}", size=total)
    rows = []
    for i, strat in chosen:
        rows.append(ScanRow(
            i, _describe(strat, seeds),
            structured_nm_distance(params, source.pmf, strat),
            oracles.nm_distance(p, n, source.pmf, strat),
        ))
    h_min = -math.log2(float(classical.guessing_probability(source.pmf)))
    return NmScan(p, n, rows, total, sampled, h_min)


def load_pmf(path: str) -> Source:
    """Read ``{"pmf": [[x, e, "num/den"], ...]}``; ``x`` is a list of coefficients."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    pmf = {}
    for x, e, pr in doc["pmf"]:
        key = (tuple(x), tuple(e) if isinstance(e, list) else e)
        pmf[key] = pmf.get(key, Fraction(0)) + Fraction(pr)
    if sum(pmf.values()) != 1:
        raise DomainError("pmf does not sum to 1")
    return Source(pmf)


def named_source(kind: str, p: int, n: int) -> Source:
    """``uniform``, ``constant`` (x = 0...01), ``half`` (uniform on the first
    ``p^n // p`` vectors, i.e. x_{n-1} = 0), ``leak1`` (uniform, first
    coordinate leaked) or ``file:PATH`` (see :func:`load_pmf`).

    For one-round runs pass ``p = 2``.
    """
    if kind.startswith("file:"):
        return load_pmf(kind[5:])
    values = list(fp_vectors(p, n))
    if kind == "uniform":
        return Source.uniform(values)
    if kind == "constant":
        return Source.constant((0,) * (n - 1) + (1,))
    if kind == "half":
        return Source.uniform([v for v in values if v[-1] == 0])
    if kind == "leak1":
        return Source({(v, v[0]): Fraction(1, len(values)) for v in values})
    raise DomainError(f"unknown source {kind!r}")


# -- lemma sweeps ------------------------------------------------------------

XOR_PRIMES = (2, 3, 5)
XOR_T = (1, 2)


@dataclass
class SweepResult:
    rows: list
    oracle_max_gap: float = 0.0
    oracle_failures: int = 0
    oracle_cases: int = 0

    @property
    def violations(self) -> int:
        return sum(r.violated for r in self.rows)

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.rows), default=0.0)

    def to_json(self, experiment: str) -> dict:
        return {
            "schema": 1,
            "experiment": experiment,
            "cases": len(self.rows),
            "violations": self.violations,
            "min_margin": self.min_margin,
            "oracle_cases": self.oracle_cases,
            "oracle_failures": self.oracle_failures,
            "oracle_max_gap": self.oracle_max_gap,
        }


def xor_sweep(cases: int, seed: int = 0, variants: Sequence[str] = ("uniform", "nonuniform"),
              classical_every: int = 4) -> SweepResult:
    """Random cq/ccq states against both XOR lemmas.

    Every ``classical_every``-th case is a random rational pmf, checked both
    through the matrix path and the exact-rational oracle.
    """
    rows, gap, failures, oracle_cases = [], 0.0, 0, 0
    case_id = 0
    for variant in variants:
        for _ in range(cases):
            rng = case_rng(seed, case_id)
            p = int(rng.choice(XOR_PRIMES))
            t = int(rng.choice(XOR_T))
            d_e = int(rng.integers(1, 5))
            if classical_every and case_id % classical_every == 0:
                report, exact = _classical_xor_case(rng, p, t, d_e, variant)
                oracle_cases += 1
                gap = max(gap, abs(report.lhs - float(exact.lhs)), abs(report.eps - float(exact.eps)))
                failures += not exact.holds
            elif variant == "uniform":
                report = cq.check_xor_lemma(cq.random_field_cq_state(rng, p, t, d_e), "uniform")
            else:
                report = cq.check_xor_lemma(cq.random_ccq_state(rng, p, t, d_e), "nonuniform")
            rows.append(Row(case_id, f"{variant}:p{p}t{t}d{d_e}", report.lhs, report.rhs, report.margin))
            case_id += 1
    return SweepResult(rows, gap, failures, oracle_cases)


def _classical_xor_case(rng, p, t, d_e, variant):
    vectors = list(fp_vectors(p, t))
    sides = list(range(d_e))
    if variant == "uniform":
        pmf = classical.random_pmf(rng, vectors, sides)
        state = cq.classical_cq_state(pmf, vectors, sides)
        state = cq.CqState.over_field(p, t, state.blocks)
    else:
        labels = [(x0, x) for x0 in range(p) for x in vectors]
        pmf = classical.random_pmf(rng, labels, sides)
        flat = cq.classical_cq_state(pmf, labels, sides).blocks
        state = cq.CcqState.over_field(p, t, flat.reshape(p, len(vectors), d_e, d_e))
    report = cq.check_xor_lemma(state, variant)
    exact = classical.xor_check_exact(pmf, p, t, variant)
    return report, exact


def sandwich_sweep(cases: int, seed: int = 0, variants: Sequence[str] = ("uniform", "nonuniform")) -> SweepResult:
    """Collision-probability sandwich bounds, identity residuals and Gamma_c <= 1."""
    rows = []
    case_id = 0
    for variant in variants:
        for _ in range(cases):
            rng = case_rng(seed, case_id)
            d_e = int(rng.integers(1, 5))
            diag = bool(rng.integers(0, 4) == 0)
            if variant == "uniform":
                state = cq.random_cq_state(rng, int(rng.integers(2, 7)), d_e, classical=diag)
            else:
                p = int(rng.choice(XOR_PRIMES))
                t = int(rng.choice(XOR_T))
                state = cq.random_ccq_state(rng, p, t, d_e, classical=diag)
            rep = cq.check_collision_sandwich(state, variant)
            col = cq.collision_prob(state)
            rows.append(Row(case_id, f"{variant}:lower", rep.lower, rep.middle, rep.lower_slack))
            rows.append(Row(case_id, f"{variant}:upper", rep.middle, rep.upper, rep.upper_slack))
            rows.append(Row(case_id, f"{variant}:identity", col.identity_lhs, col.identity_rhs, -col.residual))
            rows.append(Row(case_id, f"{variant}:gamma", col.gamma, 1.0, 1.0 - col.gamma))
            case_id += 1
    return SweepResult(rows)


def guess_sweep(cases: int, seed: int = 0) -> SweepResult:
    """The distance-to-guessing measurement on random cq states (d_X <= 4, d_E <= 8)."""
    rows = []
    for case_id in range(cases):
        rng = case_rng(seed, case_id)
        state = cq.random_cq_state(rng, int(rng.integers(2, 5)), int(rng.integers(1, 9)))
        g = cq.guess_measurement_from_distance(state)
        rows.append(Row(case_id, "success", g.success, g.predicted, -abs(g.success - g.predicted)))
        dev = max(
            float(np.abs(g.operators.sum(axis=0) - np.eye(state.d_E)).max()),
            max(0.0, -min(min(np.linalg.eigvalsh(m)) for m in g.operators)),
        )
        rows.append(Row(case_id, "povm", dev, 0.0, -dev))
    return SweepResult(rows)


# -- communication game ------------------------------------------------------

@dataclass
class GameScan:
    p: int
    n: int
    evaluated: int = 0
    certified: int = 0
    violations: int = 0
    exact_violations: int = 0
    max_advantage: Fraction = Fraction(-1)
    exhaustive: bool = True
    sources: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "experiment": "game-scan",
            "p": self.p,
            "n": self.n,
            "evaluated": self.evaluated,
            "certified": self.certified,
            "violations": self.violations,
            "exact_violations": self.exact_violations,
            "max_advantage": str(self.max_advantage),
            "exhaustive": self.exhaustive,
            "sources": list(self.sources),
        }


def game_scan(
    p: int,
    n: int = 2,
    sources: dict | None = None,
    max_blocks: int | None = None,
    partition_limit: int = 200_000,
    sample: int = 2000,
    seed: int = 0,
) -> GameScan:
    """Check the game bound for every leak function ``x -> e`` with ``|E| <= max_blocks``.

    Leak functions are enumerated as set partitions of F_p^n (the bound only
    depends on the partition).  If there are more than ``partition_limit``
    partitions and the source is uniform, partitions with ``k`` blocks are
    certified wholesale when ``sqrt(2 p^{n/2} k / p^n) >= 1 - 1/p`` (the
    bound then exceeds any possible advantage); the remaining block counts
    are enumerated and a seeded sample of the certified ones is still
    evaluated.
    """
    max_blocks = max_blocks or p
    points = list(fp_vectors(p, n))
    if sources is None:
        sources = {"uniform": {x: Fraction(1, len(points)) for x in points}}
    scan = GameScan(p, n, sources=list(sources))
    tables = {a: g_a_table(p, n, a) for a in range(1, p)}
    total = count_partitions(len(points), max_blocks)

    def evaluate(labels, pmf):
        leak = dict(zip(points, labels))
        for g in tables.values():
            res = game_best_classical(p, n, g, leak, pmf)
            scan.evaluated += 1
            scan.violations += not res.holds
            scan.exact_violations += not res.holds_exact
            scan.max_advantage = max(scan.max_advantage, res.advantage)

    if total <= partition_limit:
        for pmf in sources.values():
            for labels in set_partitions(points, max_blocks):
                evaluate(labels, pmf)
        return scan

    scan.exhaustive = False
    for name, pmf in sources.items():
        if len(set(pmf.values())) != 1 or len(pmf) != len(points):
            raise ResourceError(f"{total} leak partitions and source {name!r} is not uniform", size=total)
        for k in range(1, max_blocks + 1):
            bound = math.sqrt(2 * p ** (n // 2) * k / p**n)
            if bound >= 1 - 1 / p:
                scan.certified += _stirling2(len(points), k) * len(tables)
            elif k == 1:
                evaluate((0,) * len(points), pmf)
            else:
                raise ResourceError(f"block count {k} cannot be certified", size=total)
        rng = random.Random(seed)
        for _ in range(sample):
            k = rng.randint(2, max_blocks)
            evaluate(_random_partition(rng, len(points), k), pmf)
    return scan


def _stirling2(size: int, k: int) -> int:
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** size for j in range(k + 1)) // math.factorial(k)


def _random_partition(rng: random.Random, size: int, k: int) -> tuple:
    raw = [rng.randrange(k) for _ in range(size)]
    relabel = {}
    return tuple(relabel.setdefault(b, len(relabel)) for b in raw)


def g_a_scan(primes=(3, 5, 7), lengths=(2, 4)) -> list[dict]:
    out = []
    for p in primes:
        for n in lengths:
            params = NmExtParams(p, n)
            for a in range(1, p):
                out.append({"p": p, "n": n, "a": a, "max_preimages": g_a_max_preimages(params, a)})
    return out


# -- MAC attack --------------------------------------------------------------

def mac_attack(grid=((2, 1), (3, 1), (2, 2), (3, 2))) -> list[dict]:
    out = []
    for t, L in grid:
        params = MacParams(t, L)
        adv = mac_forgery_advantage(params)
        out.append({"t": t, "L": L, "advantage": str(adv), "bound": str(params.eps), "within": adv <= params.eps})
    return out


# -- adversaries -------------------------------------------------------------

def _flip_first(bits):
    return (1 - bits[0],) + tuple(bits[1:]) if bits else bits


def named_adversary(kind: str, params: ProtocolParams) -> AdversaryStrategy:
    """Adversaries selectable from the command line."""
    if kind == "identity":
        return IDENTITY
    if params.mode == "one_round":
        if kind == "shift-y":
            return AdversaryStrategy(lambda msg, ctx: (_flip_first(msg[0]), msg[1]), name=kind)
        if kind == "random":
            def rand(msg, ctx):
                y, w = msg
                return (tuple(ctx.rng.randrange(2) for _ in y), tuple(ctx.rng.randrange(2) for _ in w))
            return AdversaryStrategy(rand, name=kind)
        raise DomainError(f"unknown one-round adversary {kind!r}")
    p = params.p
    if kind == "swap-seed":
        return seed_map_adversary(lambda ya, e: ((ya[0] + 1) % p,) + ya[1:], name=kind)
    if kind == "flip-tag":
        return AdversaryStrategy(tamper2=lambda msg, ctx: (msg[0], _flip_first(msg[1])), name=kind)
    if kind == "garbage":
        def garbage(msg, ctx):
            yb, w = msg
            return (tuple(ctx.rng.randrange(2) for _ in yb), tuple(ctx.rng.randrange(2) for _ in w))
        return AdversaryStrategy(tamper2=garbage, name=kind)
    raise DomainError(f"unknown adversary {kind!r}")


def tampering_family(params: ProtocolParams):
    """Deterministic classical tampering family for exhaustive robustness checks.

    ``f1`` ranges over every map on seeds; ``f2`` is the identity, every
    nonzero XOR offset of ``(Y_B, W)`` or every constant replacement.
    Yields ``(name, f1, f2)`` with plain maps usable by the oracle as well.
    """
    seeds = list(fp_vectors(params.p, params.seed_len))
    msg_bits = list(fp_vectors(2, params.d2 + params.t))
    d2 = params.d2

    def offset(delta):
        return lambda ya, yb, w, e: (
            tuple(a ^ b for a, b in zip(yb, delta[:d2])),
            tuple(a ^ b for a, b in zip(w, delta[d2:])),
        )

    def constant(value):
        return lambda ya, yb, w, e: (value[:d2], value[d2:])

    second = [("id", lambda ya, yb, w, e: (yb, w))]
    second += [(f"xor{''.join(map(str, d))}", offset(d)) for d in msg_bits if any(d)]
    second += [(f"set{''.join(map(str, c))}", constant(c)) for c in msg_bits]
    for images in itertools.product(seeds, repeat=len(seeds)):
        table = dict(zip(seeds, images))
        f1 = lambda ya, e, table=table: table[ya]
        label = ",".join("".join(map(str, v)) for v in images)
        for name2, f2 in second:
            yield f"f1=[{label}] f2={name2}", f1, f2


@dataclass
class RobustnessCheck:
    strategies: int = 0
    mismatches: int = 0
    ledger_discrepancies: int = 0
    max_failure: Fraction = Fraction(0)
    max_changed_accept: Fraction = Fraction(0)


def robustness_crosscheck(params: ProtocolParams, source: Source) -> RobustnessCheck:
    """Protocol harness vs. the brute-force oracle on every strategy of the tampering family."""
    from .protocol import security_experiment

    out = RobustnessCheck()
    for name, f1, f2 in tampering_family(params):
        adv = seed_map_adversary(f1, f2, name)
        rep = security_experiment(params, source, adv, mode="exhaustive")
        ref = oracles.dw_robustness(params.p, params.n, params.d2, params.t, params.m, source.pmf, f1, f2)
        out.strategies += 1
        expected = ref.get("robustness", Fraction(0))
        if rep.robustness_pre != expected or rep.keyconfirmed_changed != ref.get("confirmed_changed", Fraction(0)):
            out.mismatches += 1
        if rep.forgery_discrepancy != 0:
            out.ledger_discrepancies += 1
        out.max_failure = max(out.max_failure, rep.robustness_pre)
        out.max_changed_accept = max(out.max_changed_accept, rep.keyconfirmed_changed)
    return out


# -- config ------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    kind: str = "report"
    p: int = 3
    n: int = 2
    t: int = 2
    L: int = 1
    d2: int = 2
    m: int = 1
    k: float | None = None
    eps: str = "1/2"
    source: str = "uniform"
    adversary: str = "identity"
    seed: int = 0
    mode: str = "exhaustive"
    trials: int = 1000
    cases: int = 1000
    sample: int | None = None
    max_blocks: int | None = None
    grid: str = "2:1,3:1,2:2"
    out: str | None = None
    csv: str | None = None

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"config line without '=': {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise DomainError(f"unknown config key {key!r}")
            kw[key] = _coerce(types[key], val)
        return cls(**kw)

    def with_env(self, environ=os.environ) -> "ExperimentConfig":
        if "NMEXT_SEED" in environ:
            return ExperimentConfig(**{**asdict(self), "seed": int(environ["NMEXT_SEED"])})
        return self


def _coerce(typ: str, val: str):
    if val.lower() in ("none", ""):
        return None
    if typ.startswith("int"):
        return int(val)
    if typ.startswith("float"):
        return float(val)
    return val


def dumps(doc) -> str:
    """Canonical JSON for reports: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
