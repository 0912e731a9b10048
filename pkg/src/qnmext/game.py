"""The guessing game GUESS(n, p, g) with classical side information.

Bob holds a uniform seed ``y`` and Alice's leak ``e = leak(x)``; he outputs
``y' != y`` and ``b`` and wins when ``b = <x, g(y, y')>``.  With classical
side information the optimal strategy is a best response per ``(y, e)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import DomainError, ResourceError
from .extractors import NmExtParams, g_a_eval
from .field import fp_vectors, inner_product

BOUND_SLACK = 1e-12
MAX_ATOMS = 1 << 24


@dataclass
class GameResult:
    win: Fraction
    p_guess: Fraction
    p: int
    n: int

    @property
    def h_min(self) -> float:
        return -math.log2(self.p_guess)

    @property
    def advantage(self) -> Fraction:
        return self.win - Fraction(1, self.p)

    @property
    def bound(self) -> float:
        """``sqrt(2 p^{n/2} 2^{-H_min})``: the most advantage compatible with H_min."""
        return math.sqrt(2 * self.p ** (self.n // 2) * float(self.p_guess))

    @property
    def holds(self) -> bool:
        return float(self.advantage) <= self.bound + BOUND_SLACK

    @property
    def holds_exact(self) -> bool:
        adv = self.advantage
        return adv <= 0 or adv * adv <= 2 * self.p ** (self.n // 2) * self.p_guess


def g_a_table(p: int, n: int, a: int) -> dict:
    params = NmExtParams(p, n)
    seeds = list(fp_vectors(p, n // 2))
    return {(y, yp): g_a_eval(params, a, y, yp) for y in seeds for yp in seeds if y != yp}


def game_best_classical(p: int, n: int, g, leak, source: dict) -> GameResult:
    """Exact optimal win probability and the guessing probability of ``X`` given the leak.

    ``g`` is a table ``{(y, y'): vector}`` or a callable; ``leak`` maps ``x``
    to a hashable ``e`` (dict or callable); ``source`` is a pmf over ``x``.
    """
    if n % 2:
        raise DomainError("n must be even")
    seeds = list(fp_vectors(p, n // 2))
    if len(source) * len(seeds) ** 2 * p > MAX_ATOMS:
        raise ResourceError("game enumeration too large", size=len(source) * len(seeds) ** 2)
    g_of = g.__getitem__ if isinstance(g, dict) else (lambda pair: g(*pair))
    leak_of = leak.__getitem__ if isinstance(leak, dict) else leak
    by_e = defaultdict(list)
    for x, pr in source.items():
        if pr:
            by_e[leak_of(x)].append((x, pr))
    p_guess = sum((max(pr for _, pr in group) for group in by_e.values()), Fraction(0))
    total = Fraction(0)
    for y in seeds:
        for group in by_e.values():
            best = Fraction(0)
            for yp in seeds:
                if yp == y:
                    continue
                vec = g_of((y, yp))
                mass = [Fraction(0)] * p
                for x, pr in group:
                    mass[inner_product(p, x, vec)] += pr
                best = max(best, max(mass))
            total += best
    return GameResult(total / len(seeds), p_guess, p, n)


def set_partitions(items: Sequence, max_blocks: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings: every partition of ``items`` into at most ``max_blocks`` blocks, once."""
    size = len(items)
    if size == 0:
        yield ()
        return
    labels = [0] * size

    def rec(i, used):
        if i == size:
            yield tuple(labels)
            return
        for b in range(min(used + 1, max_blocks)):
            labels[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(1, 1)


def count_partitions(size: int, max_blocks: int) -> int:
    """Number of set partitions of ``size`` items into at most ``max_blocks`` blocks."""
    # Stirling numbers of the second kind, row by row
    row = [1] + [0] * max_blocks
    for _ in range(size):
        new = [0] * (max_blocks + 1)
        for k in range(1, max_blocks + 1):
            new[k] = k * row[k] + row[k - 1]
        row = new
    return sum(row[1:]) if size else 1
