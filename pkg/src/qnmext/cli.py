"""``qnmext`` command line.

Exit codes: 0 success, 2 when a checked inequality or invariant fails,
3 on ResourceError, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields, replace
from fractions import Fraction

from . import harness
from .errors import DomainError, InvariantViolation, ResourceError
from .extractors import NmExtParams, nmext_eval
from .harness import ExperimentConfig, dumps
from .protocol import ProtocolParams, run_dw, run_one_round, security_experiment

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_RESOURCE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _common(sub, *names):
    sub.add_argument("--config", help="key=value file with ExperimentConfig fields")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="write the JSON report here instead of stdout")
    opts = {
        "p": dict(type=int), "n": dict(type=int), "t": dict(type=int), "L": dict(type=int),
        "d2": dict(type=int), "m": dict(type=int), "k": dict(type=float), "eps": dict(),
        "source": dict(), "adversary": dict(), "mode": dict(choices=["exhaustive", "monte_carlo"]),
        "trials": dict(type=int), "cases": dict(type=int), "sample": dict(type=int),
        "max_blocks": dict(type=int), "grid": dict(), "csv": dict(help="write the CSV table here"),
    }
    for name in names:
        sub.add_argument("--" + name.replace("_", "-"), dest=name, **opts[name])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnmext", description="Non-malleable extractor and privacy amplification experiments")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = subs.add_parser("nmext-eval", help="evaluate nmExt(x, y)")
    ev.add_argument("--p", type=int, required=True)
    ev.add_argument("--n", type=int, required=True)
    ev.add_argument("--x", type=_ints, required=True)
    ev.add_argument("--y", type=_ints, required=True)

    _common(subs.add_parser("nm-scan", help="exact distance over every fixed-point-free tampering map"),
            "p", "n", "source", "sample", "csv")
    _common(subs.add_parser("xor-sweep", help="random states against both XOR lemmas"), "cases", "csv")
    _common(subs.add_parser("sandwich-sweep", help="collision sandwich bounds and identities"), "cases", "csv")
    _common(subs.add_parser("guess-sweep", help="distance-to-guessing measurement"), "cases", "csv")
    _common(subs.add_parser("game-scan", help="guessing game bound over all leak functions"),
            "p", "n", "max_blocks", "sample")
    _common(subs.add_parser("mac-attack", help="exact MAC forgery advantage"), "grid")
    _common(subs.add_parser("dw-run", help="security experiment for the two-message protocol"),
            "p", "n", "d2", "t", "m", "source", "adversary", "mode", "trials")
    _common(subs.add_parser("one-round-run", help="security experiment for the one-message protocol"),
            "n", "k", "eps", "source", "adversary", "mode", "trials")
    _common(subs.add_parser("report", help="small battery of every check"), "cases")
    return parser


def resolve_config(args: argparse.Namespace, environ=os.environ) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags, then ``NMEXT_SEED``."""
    cfg = ExperimentConfig.from_file(args.config) if getattr(args, "config", None) else ExperimentConfig()
    overrides = {f.name: getattr(args, f.name) for f in fields(cfg) if getattr(args, f.name, None) is not None}
    cfg = replace(cfg, kind=args.command, **overrides)
    return cfg.with_env(environ)


def _emit(doc: dict, cfg: ExperimentConfig, out) -> None:
    text = dumps(doc)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _write_csv(cfg: ExperimentConfig, text: str) -> None:
    if cfg.csv:
        with open(cfg.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# -- commands ------------------------------------------------------------------

def _cmd_nm_scan(cfg, out) -> int:
    scan = harness.nm_distance_scan(cfg.p, cfg.n, harness.named_source(cfg.source, cfg.p, cfg.n),
                                    sample=cfg.sample, seed=cfg.seed)
    _write_csv(cfg, scan.to_csv())
    _emit(scan.to_json(), cfg, out)
    return EXIT_OK if scan.all_match else EXIT_VIOLATION


def _sweep(name, fn):
    def cmd(cfg, out) -> int:
        res = fn(cfg.cases, cfg.seed)
        _write_csv(cfg, harness.rows_to_csv(res.rows))
        _emit(res.to_json(name), cfg, out)
        return EXIT_VIOLATION if res.violations or res.oracle_failures else EXIT_OK
    return cmd


def _cmd_game_scan(cfg, out) -> int:
    scan = harness.game_scan(cfg.p, cfg.n, max_blocks=cfg.max_blocks,
                             sample=2000 if cfg.sample is None else cfg.sample, seed=cfg.seed)
    _emit(scan.to_json(), cfg, out)
    return EXIT_VIOLATION if scan.violations or scan.exact_violations else EXIT_OK


def _parse_grid(text: str):
    try:
        return tuple(tuple(int(v) for v in item.split(":")) for item in text.split(","))
    except ValueError as exc:
        raise DomainError(f"grid must look like 2:1,3:1 (got {text!r})") from exc


def _cmd_mac_attack(cfg, out) -> int:
    rows = harness.mac_attack(_parse_grid(cfg.grid))
    _emit({"schema": 1, "experiment": "mac-attack", "rows": rows}, cfg, out)
    return EXIT_OK if all(r["within"] for r in rows) else EXIT_VIOLATION


def _protocol_doc(params, cfg, report, sample_run) -> dict:
    doc = report.to_json()
    doc.update(experiment=cfg.kind, seed=cfg.seed, source=cfg.source, adversary=cfg.adversary,
               sample_transcript=sample_run.to_json())
    return doc


def _cmd_dw_run(cfg, out) -> int:
    params = ProtocolParams(p=cfg.p, n=cfg.n, d2=cfg.d2, t=cfg.t, m=cfg.m)
    source = harness.named_source(cfg.source, cfg.p, cfg.n)
    adversary = harness.named_adversary(cfg.adversary, params)
    report = security_experiment(params, source, adversary, cfg.mode, cfg.trials, cfg.seed)
    _emit(_protocol_doc(params, cfg, report, run_dw(params, source, adversary, cfg.seed)), cfg, out)
    return EXIT_VIOLATION if report.forgery_discrepancy else EXIT_OK


def _cmd_one_round_run(cfg, out) -> int:
    k = cfg.n if cfg.k is None else cfg.k
    params = ProtocolParams.one_round(cfg.n, k, Fraction(cfg.eps))
    source = harness.named_source(cfg.source, 2, cfg.n)
    adversary = harness.named_adversary(cfg.adversary, params)
    report = security_experiment(params, source, adversary, cfg.mode, cfg.trials, cfg.seed)
    doc = _protocol_doc(params, cfg, report, run_one_round(params, source, adversary, cfg.seed))
    doc.update(v=params.v, m=params.m)
    _emit(doc, cfg, out)
    return EXIT_OK


def _cmd_report(cfg, out) -> int:
    cases = min(cfg.cases, 200)
    sweeps = {
        "xor": harness.xor_sweep(cases, cfg.seed),
        "sandwich": harness.sandwich_sweep(cases, cfg.seed),
        "guess": harness.guess_sweep(cases, cfg.seed),
    }
    scans = {k: harness.nm_distance_scan(3, 2, harness.named_source(k, 3, 2)) for k in ("uniform", "constant", "half")}
    game = harness.game_scan(3, 2)
    mac = harness.mac_attack()
    g_a = harness.g_a_scan()
    params = ProtocolParams()
    dw = security_experiment(params, harness.named_source("uniform", 3, 2))
    one = ProtocolParams.one_round(4, 4, Fraction(1, 2))
    one_rep = security_experiment(one, harness.named_source("uniform", 2, 4))
    checks = {
        "g_a_preimages": all(r["max_preimages"] <= 2 for r in g_a),
        "xor": sweeps["xor"].violations == 0 and sweeps["xor"].oracle_failures == 0,
        "sandwich": sweeps["sandwich"].violations == 0,
        "guess": sweeps["guess"].violations == 0,
        "game": game.violations == 0 and game.exact_violations == 0,
        "mac": all(r["within"] for r in mac),
        "nm_scan_oracle": all(s.all_match for s in scans.values()),
        "dw_correct": dw.correctness == 1,
        "one_round_correct": one_rep.correctness == 1,
        "one_round_extraction": one_rep.extraction_a == 0,
    }
    doc = {
        "schema": 1,
        "experiment": "report",
        "seed": cfg.seed,
        "cases": cases,
        "checks": checks,
        "sweeps": {k: v.to_json(k) for k, v in sweeps.items()},
        "nm_scan": {k: {"max": str(s.max_distance), "mean": str(s.mean_distance)} for k, s in scans.items()},
        "game": game.to_json(),
        "mac": mac,
        "dw": dw.to_json(),
        "one_round": one_rep.to_json(),
    }
    _emit(doc, cfg, out)
    return EXIT_OK if all(checks.values()) else EXIT_VIOLATION


COMMANDS = {
    "nm-scan": _cmd_nm_scan,
    "xor-sweep": _sweep("xor-sweep", harness.xor_sweep),
    "sandwich-sweep": _sweep("sandwich-sweep", harness.sandwich_sweep),
    "guess-sweep": _sweep("guess-sweep", harness.guess_sweep),
    "game-scan": _cmd_game_scan,
    "mac-attack": _cmd_mac_attack,
    "dw-run": _cmd_dw_run,
    "one-round-run": _cmd_one_round_run,
    "report": _cmd_report,
}


def main(argv=None, out=None, err=None, environ=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    environ = os.environ if environ is None else environ
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "nmext-eval":
            out.write(f"{nmext_eval(NmExtParams(args.p, args.n), args.x, args.y)}\n")
            return EXIT_OK
        cfg = resolve_config(args, environ)
        return COMMANDS[args.command](cfg, out)
    except UsageError as exc:
        err.write(f"{parser.prog}: error: {exc}\n")
        parser.print_usage(err)
        return EXIT_USAGE
    except ResourceError as exc:
        err.write(f"resource limit: {exc}\n")
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        err.write(f"invariant violated: {exc}\n")
        return EXIT_VIOLATION
    except (DomainError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
