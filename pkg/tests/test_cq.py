from fractions import Fraction

import numpy as np
import pytest

from qnmext import classical, cq
from qnmext.errors import DomainError, ResourceError


def _copy_state(d=2):
    blocks = np.zeros((d, d, d))
    for x in range(d):
        blocks[x, x, x] = 1 / d
    return cq.CqState(blocks)


def _uniform_product(d_x, rho_e):
    return cq.CqState(np.array([rho_e / d_x] * d_x))


def test_state_validation():
    with pytest.raises(DomainError):
        cq.CqState(np.array([[[0.5]], [[0.6]]]))
    with pytest.raises(DomainError):
        cq.CqState(np.array([[[1.2]], [[-0.2]]]))


def test_trace_distance_examples():
    rho = cq.CqState(np.array([[[0.75]], [[0.25]]]))
    assert cq.distance_from_uniform(rho) == pytest.approx(0.25)
    assert cq.trace_distance(rho, rho) == pytest.approx(0)
    zero, one = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert cq.trace_distance(zero, one) == pytest.approx(1)
    with pytest.raises(DomainError):
        cq.trace_distance(zero, np.eye(3) / 3)


def test_collision_examples():
    col = cq.collision_prob(cq.CqState(np.full((3, 1, 1), 1 / 3)))
    assert col.gamma == pytest.approx(1 / 3)
    col = cq.collision_prob(_copy_state())
    assert col.gamma == pytest.approx(1)
    assert col.within_bound


def test_sandwich_examples():
    rep = cq.check_collision_sandwich(_uniform_product(3, np.eye(2) / 2))
    assert rep.eps == pytest.approx(0) and rep.middle == pytest.approx(0) and rep.holds
    rep = cq.check_collision_sandwich(_copy_state())
    assert (rep.lower, rep.middle, rep.upper) == pytest.approx((0.5, 0.5, 0.5))
    assert rep.holds


def test_random_states_respect_sandwich_and_identity():
    for seed in range(40):
        rng = np.random.default_rng(seed)
        state = cq.random_cq_state(rng, 3, 4)
        col = cq.collision_prob(state)
        assert col.residual <= 1e-9 and col.within_bound
        assert cq.check_collision_sandwich(state).holds
        ccq = cq.random_ccq_state(rng, 2, 1, 3)
        assert cq.collision_prob(ccq).residual <= 1e-9
        assert cq.check_collision_sandwich(ccq, "nonuniform").holds


def test_min_entropy_examples():
    h = cq.min_entropy(cq.CqState(np.full((4, 1, 1), 1 / 4)))
    assert h == pytest.approx(2)
    blocks = np.zeros((4, 2, 2))
    for x in range(4):
        blocks[x, x % 2, x % 2] = 1 / 4
    assert cq.min_entropy(cq.CqState(blocks)) == pytest.approx(1)
    bounds = cq.min_entropy(_copy_state(), "quantum_bounds")
    assert bounds.lower == pytest.approx(1) and bounds.upper == pytest.approx(1)
    with pytest.raises(DomainError):
        cq.min_entropy(cq.random_cq_state(np.random.default_rng(0), 2, 2))


def test_quantum_guess_bounds_bracket_classical():
    rng = np.random.default_rng(3)
    for _ in range(20):
        state = cq.random_cq_state(rng, 3, 3, classical=True)
        exact = 2 ** -cq.min_entropy(state)
        b = cq.min_entropy(state, "quantum_bounds")
        assert b.lower - 1e-9 <= exact <= b.upper + 1e-9


def test_xor_premise_examples():
    uni = cq.CqState.over_field(3, 2, np.full((9, 1, 1), 1 / 9))
    assert cq.xor_premise_distance(uni, (1, 2)) == pytest.approx(0)
    const = np.zeros((9, 1, 1))
    const[4, 0, 0] = 1  # x = (1, 1)
    state = cq.CqState.over_field(3, 2, const)
    assert cq.xor_premise_distance(state, (1, 0)) == pytest.approx(2 / 3)
    blocks = np.zeros((3, 9, 1, 1))
    blocks[:, 0, 0, 0] = 1 / 3  # x = 0, x0 uniform
    ccq = cq.CcqState.over_field(3, 2, blocks)
    assert cq.xor_premise_distance(ccq, (2, 1), "nonuniform") == pytest.approx(0)
    with pytest.raises(DomainError):
        cq.xor_premise_distance(cq.CqState(np.full((4, 1, 1), 0.25)), (1,))


def test_xor_independent_x0_is_tight_at_zero():
    rng = np.random.default_rng(1)
    inner = cq.random_field_cq_state(rng, 3, 1, 2).blocks
    ccq = cq.CcqState.over_field(3, 1, np.array([inner / 3] * 3))
    rep = cq.check_xor_lemma(ccq, "nonuniform")
    assert rep.lhs == pytest.approx(0, abs=1e-12) and rep.eps == pytest.approx(0, abs=1e-12)
    assert rep.holds


def test_xor_limits():
    with pytest.raises(ResourceError):
        cq.check_xor_lemma(cq.random_field_cq_state(np.random.default_rng(0), 2, 2, 9))


def test_classical_oracle_agrees_on_diagonal_states():
    rng = np.random.default_rng(11)
    vectors = [(a, b) for a in range(3) for b in range(3)]
    pmf = classical.random_pmf(rng, vectors, [0, 1])
    state = cq.CqState.over_field(3, 2, cq.classical_cq_state(pmf, vectors, [0, 1]).blocks)
    rep = cq.check_xor_lemma(state)
    exact = classical.xor_check_exact(pmf, 3, 2, "uniform")
    assert abs(rep.lhs - float(exact.lhs)) <= 1e-9
    assert abs(rep.eps - float(exact.eps)) <= 1e-9
    assert exact.holds
    assert cq.distance_from_uniform(state) == pytest.approx(float(classical.distance_from_uniform(pmf, vectors)))
    assert cq.collision_prob(state).gamma == pytest.approx(float(classical.collision_probability(pmf)))


def test_guess_measurement_examples():
    g = cq.guess_measurement_from_distance(cq.CqState(np.full((3, 1, 1), 1 / 3)))
    assert g.success == pytest.approx(1 / 3)
    g = cq.guess_measurement_from_distance(_copy_state())
    assert g.success == pytest.approx(0.75)
    assert cq.is_povm(g.operators)
    rng = np.random.default_rng(5)
    state = cq.random_cq_state(rng, 3, 2)
    g = cq.guess_measurement_from_distance(state)
    eps = cq.trace_distance(state, cq.uniform_product(state))
    assert g.success == pytest.approx(1 / 3 + eps / 3, abs=1e-9)
    assert cq.is_povm(g.operators)


def test_state_json_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    state = cq.random_field_cq_state(rng, 2, 2, 2)
    path = tmp_path / "s.json"
    cq.dump_state(state, path)
    back = cq.load_state(path)
    assert back.labels == state.labels and np.allclose(back.blocks, state.blocks)
    ccq = cq.random_ccq_state(rng, 2, 1, 2)
    cq.dump_state(ccq, path)
    back = cq.load_state(path)
    assert isinstance(back, cq.CcqState) and np.allclose(back.blocks, ccq.blocks)


def test_exact_classical_helpers():
    pmf = {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    assert classical.guessing_probability(pmf) == 1
    assert classical.collision_probability(pmf) == 1
    assert classical.distance_from_uniform(pmf, [0, 1]) == Fraction(1, 2)
