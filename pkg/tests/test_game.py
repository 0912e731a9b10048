import math
from fractions import Fraction

import pytest

from qnmext.errors import DomainError
from qnmext.field import fp_vectors
from qnmext.game import count_partitions, g_a_table, game_best_classical, set_partitions


def _uniform(p, n):
    xs = list(fp_vectors(p, n))
    return {x: Fraction(1, len(xs)) for x in xs}


def test_full_leak_wins_always():
    res = game_best_classical(3, 2, g_a_table(3, 2, 1), lambda x: x, _uniform(3, 2))
    assert res.win == 1 and res.p_guess == 1 and res.h_min == 0
    assert res.holds and res.holds_exact


def test_no_leak_uniform_is_a_coin_flip():
    res = game_best_classical(3, 2, g_a_table(3, 2, 1), lambda x: 0, _uniform(3, 2))
    assert res.win == Fraction(1, 3)
    assert res.advantage == 0


def test_one_symbol_leak():
    res = game_best_classical(5, 2, g_a_table(5, 2, 2), lambda x: x[0], _uniform(5, 2))
    assert res.p_guess == Fraction(1, 5)
    assert res.holds and res.holds_exact
    assert float(res.advantage) <= math.sqrt(2 * 5 * 0.2)


def test_odd_length_rejected():
    with pytest.raises(DomainError):
        game_best_classical(3, 3, {}, lambda x: 0, {})


@pytest.mark.parametrize("size, k", [(0, 3), (1, 1), (4, 2), (5, 3), (9, 3)])
def test_partitions_match_stirling_count(size, k):
    parts = list(set_partitions(list(range(size)), k))
    assert len(parts) == len(set(parts)) == count_partitions(size, k)
    for labels in parts:
        assert all(labels[i] <= max(labels[:i], default=-1) + 1 for i in range(len(labels)))


def test_known_counts():
    assert count_partitions(9, 3) == 3281
    assert count_partitions(4, 4) == 15
