"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline (they
are also printed when run as a script).
"""

import io
import time
from fractions import Fraction

import numpy as np
import pytest

from qnmext import cq, harness
from qnmext.cli import main
from qnmext.extractors import NmExtParams, g_a_max_preimages
from qnmext.field import fp_vectors
from qnmext.mac import MacParams, mac_forgery_advantage
from qnmext.protocol import ProtocolParams, Source, execute_dw, security_experiment

SLACK = 1e-9


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, started):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({time.perf_counter() - started:.1f}s)"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_criterion_01_collision_function_preimages(report):
    t0 = time.perf_counter()
    worst = max(
        g_a_max_preimages(NmExtParams(p, n), a)
        for p in (3, 5, 7) for n in (2, 4) for a in range(1, p)
    )
    report(1, worst <= 2 and time.perf_counter() - t0 < 60, f"max preimages {worst} (limit 2)", t0)


def test_criterion_02_xor_lemmas(report):
    t0 = time.perf_counter()
    res = harness.xor_sweep(1000, seed=2024)
    per_variant = {v: sum(r.variant.startswith(v + ":") for r in res.rows) for v in ("uniform", "nonuniform")}
    ok = (
        res.violations == 0
        and min(per_variant.values()) >= 1000
        and res.oracle_failures == 0
        and res.oracle_max_gap <= 1e-9
        and time.perf_counter() - t0 < 300
    )
    report(2, ok, f"{len(res.rows)} states, min margin {res.min_margin:.3g}, "
                  f"{res.oracle_cases} exact-oracle cases, max gap {res.oracle_max_gap:.2g}", t0)


def test_criterion_03_collision_sandwich(report):
    t0 = time.perf_counter()
    res = harness.sandwich_sweep(1000, seed=2024)
    by_kind = {}
    for r in res.rows:
        kind = r.variant.split(":")[1]
        by_kind[kind] = min(by_kind.get(kind, np.inf), r.margin)
    cases = len({(r.case_id) for r in res.rows})
    ok = (
        res.violations == 0
        and by_kind["identity"] >= -1e-9
        and by_kind["gamma"] >= -1e-9
        and min(by_kind["lower"], by_kind["upper"]) >= -SLACK
        and cases >= 2000
        and time.perf_counter() - t0 < 300
    )
    report(3, ok, f"{cases} states, worst identity residual {-by_kind['identity']:.2g}, "
                  f"min bound slack {min(by_kind['lower'], by_kind['upper']):.2g}, "
                  f"max Gamma excess {-by_kind['gamma']:.2g}", t0)


def test_criterion_04_guessing_measurement(report):
    t0 = time.perf_counter()
    res = harness.guess_sweep(250, seed=2024)
    success_gap = max(-r.margin for r in res.rows if r.variant == "success")
    povm_gap = max(-r.margin for r in res.rows if r.variant == "povm")
    ok = success_gap <= 1e-9 and povm_gap <= 1e-9
    report(4, ok, f"250 states, max |success - predicted| {success_gap:.2g}, max POVM deviation {povm_gap:.2g}", t0)


def test_criterion_05_guessing_game(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    xs = list(fp_vectors(3, 2))
    sources = {"uniform": {x: Fraction(1, 9) for x in xs}}
    for i in range(2):
        w = rng.integers(1, 6, size=len(xs))
        sources[f"random{i}"] = {x: Fraction(int(v), int(w.sum())) for x, v in zip(xs, w)}
    p3 = harness.game_scan(3, 2, sources=sources)
    p5 = harness.game_scan(5, 2, sample=2000, seed=5)
    ok = (
        p3.exhaustive and p3.violations == 0 and p3.exact_violations == 0
        and p5.violations == 0 and p5.exact_violations == 0
        and time.perf_counter() - t0 < 120
    )
    report(5, ok, f"p=3 exhaustive {p3.evaluated} games over 3 sources; "
                  f"p=5 {p5.certified} certified + {p5.evaluated} evaluated; zero violations", t0)


def test_criterion_06_mac_forgery(report):
    t0 = time.perf_counter()
    a21 = mac_forgery_advantage(MacParams(2, 1))
    a31 = mac_forgery_advantage(MacParams(3, 1))
    a22 = mac_forgery_advantage(MacParams(2, 2))
    a32 = mac_forgery_advantage(MacParams(3, 2))
    ok = a21 == Fraction(1, 4) and a31 == Fraction(1, 8) and a22 <= Fraction(1, 2) and a32 <= Fraction(1, 4)
    report(6, ok, f"(2,1)={a21} (3,1)={a31} (2,2)={a22} (3,2)={a32}", t0)


def test_criterion_07_nm_scan_oracle(report):
    t0 = time.perf_counter()
    scans = {k: harness.nm_distance_scan(3, 2, harness.named_source(k, 3, 2)) for k in ("uniform", "constant", "half")}
    ok = all(len(s.rows) == 8 and s.all_match for s in scans.values()) and time.perf_counter() - t0 < 60
    detail = ", ".join(f"{k} max {s.max_distance}" for k, s in scans.items())
    report(7, ok, f"3 sources x 8 strategies bit-exact; {detail}", t0)


def test_criterion_08_correctness_and_extraction(report):
    t0 = time.perf_counter()
    dw = ProtocolParams(p=3, n=2, d2=2, t=2, m=1)
    dw_ok = all(
        (rec := execute_dw(dw, x, 0, ya, yb)).r_a == rec.r_b is not None
        for x in fp_vectors(3, 2) for ya in fp_vectors(3, 1) for yb in fp_vectors(2, 2)
    )
    one = ProtocolParams.one_round(4, 4, Fraction(1, 2))
    rep = security_experiment(one, Source.uniform(one.source_values()))
    ok = dw_ok and rep.correctness == 1 and rep.extraction_a == 0 and time.perf_counter() - t0 < 60
    report(8, ok, f"DW honest runs all agree: {dw_ok}; one-round correctness {rep.correctness}, "
                  f"distance of (Y, W, R_A) from uniform {rep.extraction_a}", t0)


def test_criterion_09_robustness_crosscheck(report):
    t0 = time.perf_counter()
    params = ProtocolParams(p=3, n=2, d2=2, t=2, m=1)
    res = harness.robustness_crosscheck(params, harness.named_source("uniform", 3, 2))
    ok = res.strategies == 864 and res.mismatches == 0 and res.ledger_discrepancies == 0
    report(9, ok, f"{res.strategies} strategies, {res.mismatches} oracle mismatches, "
                  f"{res.ledger_discrepancies} ledger discrepancies, max failure {res.max_failure}", t0)


def test_criterion_10_determinism(report, tmp_path):
    t0 = time.perf_counter()
    commands = [
        ["nm-scan", "--p", "3", "--n", "2", "--source", "half"],
        ["xor-sweep", "--cases", "20", "--seed", "7"],
        ["sandwich-sweep", "--cases", "20", "--seed", "7"],
        ["game-scan", "--p", "3", "--max-blocks", "2"],
        ["dw-run", "--adversary", "garbage", "--mode", "monte_carlo", "--trials", "200", "--seed", "3"],
        ["one-round-run", "--n", "4", "--adversary", "random", "--seed", "3"],
        ["report", "--cases", "5", "--seed", "1"],
    ]
    mismatched = []
    for i, argv in enumerate(commands):
        outputs = []
        for rep in range(2):
            csv_path = tmp_path / f"{i}-{rep}.csv"
            extra = ["--csv", str(csv_path)] if "sweep" in argv[0] or argv[0] == "nm-scan" else []
            buf = io.StringIO()
            code = main(argv + extra, buf, io.StringIO(), {})
            outputs.append((code, buf.getvalue(), csv_path.read_bytes() if extra else b""))
        if outputs[0] != outputs[1] or outputs[0][0] != 0:
            mismatched.append(argv[0])
    report(10, not mismatched, f"{len(commands)} experiments re-run byte-identical"
           + (f"; mismatched: {mismatched}" if mismatched else ""), t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
