"""Exact rational versions of the cq quantities for classical side information.

Joint distributions are dicts ``{(label, e): Fraction}``.  Nothing here calls
into the matrix code, so these functions serve as an independent check of it
on diagonal states.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .field import fp_vectors

Pmf = dict


def _ip(p, a, x):
    return sum(u * v for u, v in zip(a, x)) % p


def marginal_e(pmf: Pmf) -> dict:
    out = defaultdict(Fraction)
    for (_, e), pr in pmf.items():
        out[e] += pr
    return out


def distance_from_uniform(pmf: Pmf, labels: Sequence) -> Fraction:
    """Statistical distance of ``(X, E)`` from ``(U_X, E)``."""
    pe = marginal_e(pmf)
    d = len(labels)
    return sum(
        abs(pmf.get((x, e), Fraction(0)) - pe[e] / d) for x in labels for e in pe
    ) / 2


def guessing_probability(pmf: Pmf) -> Fraction:
    best = defaultdict(Fraction)
    for (_, e), pr in pmf.items():
        best[e] = max(best[e], pr)
    return sum(best.values(), Fraction(0))


def collision_probability(pmf: Pmf) -> Fraction:
    """``sum_{x,e} p(x,e)^2 / p(e)``."""
    pe = marginal_e(pmf)
    return sum((pr * pr / pe[e] for (_, e), pr in pmf.items() if pr), Fraction(0))


@dataclass
class ExactXorReport:
    lhs: Fraction
    eps: Fraction
    scale: int  # p^t or p^(t+1)

    @property
    def holds(self) -> bool:
        # lhs <= sqrt(scale * eps / 2), compared after squaring
        return 2 * self.lhs * self.lhs <= self.scale * self.eps

    @property
    def rhs(self) -> float:
        return float(np.sqrt(self.scale * float(self.eps) / 2))


def xor_check_exact(pmf: Pmf, p: int, t: int, variant: str) -> ExactXorReport:
    """XOR-lemma check in exact arithmetic.

    uniform: labels are vectors of F_p^t.  nonuniform: labels are pairs
    ``(x0, x)`` with ``x0`` in F_p.
    """
    sides = list(marginal_e(pmf))
    vectors = list(fp_vectors(p, t))
    eps = Fraction(0)
    for a in vectors:
        if variant == "uniform" and not any(a):
            continue
        zpmf = defaultdict(Fraction)
        for (label, e), pr in pmf.items():
            if variant == "uniform":
                z = _ip(p, a, label)
            else:
                x0, x = label
                z = (x0 + _ip(p, a, x)) % p
            zpmf[z, e] += pr
        eps = max(eps, distance_from_uniform(zpmf, range(p)))
    if variant == "uniform":
        lhs = distance_from_uniform(pmf, vectors)
        return ExactXorReport(lhs, eps, p**t)
    # distance of (X0, X, E) from (U, X, E): treat (x, e) as the side register
    regrouped = {(x0, (x, e)): pr for ((x0, x), e), pr in pmf.items()}
    full = {}
    for x in vectors:
        for e in sides:
            for x0 in range(p):
                full[x0, (x, e)] = regrouped.get((x0, (x, e)), Fraction(0))
    lhs = distance_from_uniform(full, range(p))
    return ExactXorReport(lhs, eps, p ** (t + 1))


def random_pmf(rng, labels: Sequence, sides: Sequence, max_weight: int = 8) -> Pmf:
    """Random rational joint pmf with small integer weights (some zero)."""
    while True:
        weights = rng.integers(0, max_weight + 1, size=(len(labels), len(sides)))
        if weights.sum() > 0:
            break
    total = int(weights.sum())
    return {
        (x, e): Fraction(int(weights[i, j]), total)
        for i, x in enumerate(labels)
        for j, e in enumerate(sides)
        if weights[i, j]
    }
