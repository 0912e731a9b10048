"""Brute-force reference computations.

Everything here is written against plain integers with its own field
arithmetic, so it can cross-check the structured code paths without sharing
any of their helpers.
"""

from __future__ import annotations

import functools
import itertools
from collections import defaultdict
from fractions import Fraction


@functools.lru_cache(maxsize=None)
def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic degree-k polynomial that is not a product
    of two monic polynomials of positive degree (constant term first)."""
    def monic(deg):
        for low in itertools.product(range(p), repeat=deg):
            yield low + (1,)

    def mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            for j, v in enumerate(b):
                out[i + j] = (out[i + j] + u * v) % p
        return tuple(out)

    reducible = set()
    for d in range(1, k // 2 + 1):
        for a in monic(d):
            for b in monic(k - d):
                reducible.add(mul(a, b))
    for cand in monic(k):
        if cand not in reducible:
            return cand
    raise AssertionError("no irreducible found")


def square_in_extension(p: int, y: tuple[int, ...]) -> tuple[int, ...]:
    k = len(y)
    mod = _smallest_irreducible(p, k)
    prod = [0] * (2 * k - 1)
    for i in range(k):
        for j in range(k):
            prod[i + j] = (prod[i + j] + y[i] * y[j]) % p
    for top in range(2 * k - 2, k - 1, -1):
        c = prod[top]
        if c:
            for i in range(k + 1):
                prod[top - k + i] = (prod[top - k + i] - c * mod[i]) % p
    return tuple(prod[:k])


def nmext(p: int, x: tuple[int, ...], y: tuple[int, ...]) -> int:
    enc = tuple(y) + square_in_extension(p, tuple(y))
    return sum(a * b for a, b in zip(x, enc)) % p


def gf2_mul(a: int, b: int, t: int) -> int:
    """Carry-less multiply modulo the canonical degree-t binary irreducible."""
    mod = sum(c << i for i, c in enumerate(_smallest_irreducible(2, t)))
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> t & 1:
            a ^= mod
    return out


def _bits_int(bits) -> int:
    return sum(b << i for i, b in enumerate(bits))


def _int_bits(v: int, count: int) -> tuple[int, ...]:
    return tuple((v >> i) & 1 for i in range(count))


def _index(p: int, x) -> int:
    return sum(c * p**i for i, c in enumerate(x))


def dw_components(p, n, d2, t, m, x, yb):
    """``R = Ext(X, Y_B)`` as a bit tuple, from first principles."""
    idx = _index(p, x) % (1 << (2 * d2))
    x1, x2 = idx & ((1 << d2) - 1), idx >> d2
    z = gf2_mul(_bits_int(yb), x1, d2) ^ x2
    return _int_bits(z, d2)[:m]


def dw_tag(p, t, d2, z, yb_bits):
    z %= 1 << (2 * t)
    k1, k2 = z & ((1 << t) - 1), z >> t
    blocks = -(-d2 // t)
    padded = tuple(yb_bits) + (0,) * (blocks * t - len(yb_bits))
    tag, power = k2, 1
    for i in range(blocks):
        power = gf2_mul(power, k1, t)
        tag ^= gf2_mul(_bits_int(padded[i * t : (i + 1) * t]), power, t)
    return _int_bits(tag, t)


def dw_robustness(p, n, d2, t, m, pmf, f1, f2) -> dict:
    """Exact outcome probabilities of Protocol DW under deterministic tampering.

    ``f1(ya, e) -> ya'`` and ``f2(ya, yb, w, e) -> (yb', w')``.  Returns a dict
    with ``robustness`` (both keys set and different), ``correct`` and
    ``confirmed_changed``.
    """
    seeds = list(itertools.product(range(p), repeat=n // 2))
    ybs = list(itertools.product(range(2), repeat=d2))
    scale = Fraction(1, len(seeds) * len(ybs))
    out = defaultdict(Fraction)
    for (x, e), pr in pmf.items():
        for ya in seeds:
            z = nmext(p, x, ya)
            ya_p = tuple(f1(ya, e))
            z_p = nmext(p, x, ya_p)
            for yb in ybs:
                w = dw_tag(p, t, d2, z_p, yb)
                r_b = dw_components(p, n, d2, t, m, x, yb)
                yb_p, w_p = f2(ya, yb, w, e)
                yb_p, w_p = tuple(yb_p), tuple(w_p)
                accepted = dw_tag(p, t, d2, z, yb_p) == w_p
                weight = pr * scale
                if accepted:
                    r_a = dw_components(p, n, d2, t, m, x, yb_p)
                    if r_a != r_b:
                        out["robustness"] += weight
                    else:
                        out["correct"] += weight
                    if (yb_p, w_p) != (yb, w):
                        out["confirmed_changed"] += weight
    return dict(out)


def nm_distance(p: int, n: int, pmf: dict, strategy: dict) -> Fraction:
    """``1/2 || (Z, Z', Y, Y', E) - (U, Z', Y, Y', E) ||`` by direct counting.

    ``strategy[e][y]`` is the tampered seed; ``pmf`` maps ``(x, e)`` to
    probability.
    """
    seeds = list(itertools.product(range(p), repeat=n // 2))
    sides = sorted({e for (_, e) in pmf}, key=repr)
    total = Fraction(0)
    for e in sides:
        xs = [(x, pr) for (x, ee), pr in pmf.items() if ee == e]
        for y in seeds:
            yp = strategy[e][y]
            cell = [[Fraction(0)] * p for _ in range(p)]
            for x, pr in xs:
                cell[nmext(p, x, y)][nmext(p, x, yp)] += pr / len(seeds)
            for zp in range(p):
                col = sum(cell[z][zp] for z in range(p))
                total += sum(abs(cell[z][zp] - col / p) for z in range(p))
    return total / 2
