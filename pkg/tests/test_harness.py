from fractions import Fraction

import pytest

from qnmext import harness
from qnmext.errors import DomainError, ResourceError
from qnmext.protocol import ProtocolParams, Source


def test_nm_scan_uniform_has_eight_matching_rows():
    scan = harness.nm_distance_scan(3, 2, harness.named_source("uniform", 3, 2))
    assert len(scan.rows) == scan.total_strategies == 8
    assert scan.all_match and not scan.sampled


def test_nm_scan_constant_source():
    scan = harness.nm_distance_scan(3, 2, harness.named_source("constant", 3, 2))
    assert all(r.structured == Fraction(2, 3) for r in scan.rows)


def test_nm_scan_more_support_not_worse():
    small = harness.nm_distance_scan(3, 2, harness.named_source("half", 3, 2))
    full = harness.nm_distance_scan(3, 2, harness.named_source("uniform", 3, 2))
    assert full.max_distance <= small.max_distance


def test_nm_scan_with_side_information():
    scan = harness.nm_distance_scan(3, 2, harness.named_source("leak1", 3, 2))
    assert scan.total_strategies == 8**3 and scan.all_match


def test_nm_scan_limits_and_sampling():
    src = harness.named_source("uniform", 5, 2)
    with pytest.raises(ResourceError):
        harness.nm_distance_scan(5, 2, src, max_strategies=100)
    scan = harness.nm_distance_scan(5, 2, src, max_strategies=100, sample=12, seed=4)
    assert scan.sampled and len(scan.rows) == 12 and scan.all_match


def test_nm_scan_reports_threshold():
    scan = harness.nm_distance_scan(3, 2, harness.named_source("uniform", 3, 2))
    doc = scan.to_json()
    assert doc["theorem_threshold_at_max"] > doc["source_bits"]


def test_pmf_file_source(tmp_path):
    path = tmp_path / "pmf.json"
    path.write_text('{"pmf": [[[0, 1], 0, "1/2"], [[2, 2], 1, "1/2"]]}')
    src = harness.named_source(f"file:{path}", 3, 2)
    assert src.pmf == {((0, 1), 0): Fraction(1, 2), ((2, 2), 1): Fraction(1, 2)}
    with pytest.raises(DomainError):
        harness.named_source("nope", 3, 2)


def test_sweeps_small_and_reproducible():
    a = harness.xor_sweep(12, seed=3)
    b = harness.xor_sweep(12, seed=3)
    assert harness.rows_to_csv(a.rows) == harness.rows_to_csv(b.rows)
    assert a.violations == 0 and a.oracle_failures == 0 and a.oracle_cases > 0
    assert harness.sandwich_sweep(10, seed=3).violations == 0
    assert harness.guess_sweep(10, seed=3).violations == 0


def test_csv_columns():
    text = harness.rows_to_csv(harness.guess_sweep(2).rows)
    assert text.splitlines()[0] == "case_id,variant,lhs,rhs,margin"


def test_game_scan_small():
    scan = harness.game_scan(3, 2, max_blocks=2)
    assert scan.exhaustive and scan.violations == 0
    assert scan.evaluated == 2 * 256


def test_game_scan_refuses_uncertifiable_source():
    xs = [(a, b) for a in range(5) for b in range(5)]
    skewed = {x: Fraction(1, 50) for x in xs}
    skewed[xs[0]] += Fraction(1, 2)
    with pytest.raises(ResourceError):
        harness.game_scan(5, 2, sources={"skewed": skewed}, partition_limit=10)


def test_mac_attack_rows():
    rows = harness.mac_attack(((2, 1),))
    assert rows == [{"t": 2, "L": 1, "advantage": "1/4", "bound": "1/4", "within": True}]


def test_tampering_family_size():
    fam = list(harness.tampering_family(ProtocolParams()))
    assert len(fam) == 27 * 32
    assert len({name for name, _, _ in fam}) == len(fam)


def test_named_adversaries():
    params = ProtocolParams()
    for name in ("identity", "swap-seed", "flip-tag", "garbage"):
        assert harness.named_adversary(name, params)
    one = ProtocolParams.one_round(4, 4, Fraction(1, 2))
    for name in ("identity", "shift-y", "random"):
        assert harness.named_adversary(name, one)
    with pytest.raises(DomainError):
        harness.named_adversary("shift-y", params)


def test_config_parsing_and_env():
    cfg = harness.ExperimentConfig.from_text("# comment\nkind = nm-scan\np=5\nseed = 4\nk = none\n")
    assert (cfg.kind, cfg.p, cfg.seed, cfg.k) == ("nm-scan", 5, 4, None)
    assert cfg.with_env({"NMEXT_SEED": "11"}).seed == 11
    assert cfg.with_env({}).seed == 4
    with pytest.raises(DomainError):
        harness.ExperimentConfig.from_text("bogus = 1")
    with pytest.raises(DomainError):
        harness.ExperimentConfig.from_text("no equals sign")
