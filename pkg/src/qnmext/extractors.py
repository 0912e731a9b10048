"""Seeded extractors: the inner-product non-malleable extractor and the
universal-hash strong extractor over F_{2^h}."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, ResourceError
from .field import (
    FieldSpec,
    canonical_field,
    ext_add,
    ext_mul,
    fp_vectors,
    inner_product,
    vec_square,
)

MAX_SEEDS = 1 << 14


@dataclass(frozen=True)
class NmExtParams:
    """Source length ``n`` (even) over the odd prime field F_p."""

    p: int
    n: int

    def __post_init__(self):
        FieldSpec(self.p)
        if self.p == 2:
            raise DomainError("the non-malleable extractor needs an odd prime")
        if not isinstance(self.n, int) or self.n <= 0 or self.n % 2:
            raise DomainError(f"n must be a positive even integer, got {self.n!r}")

    @property
    def seed_len(self) -> int:
        return self.n // 2

    @property
    def num_seeds(self) -> int:
        return self.p**self.seed_len


def _check_vec(p: int, v: Sequence[int], length: int, what: str) -> tuple[int, ...]:
    v = tuple(v)
    if len(v) != length:
        raise DomainError(f"{what} must have length {length}, got {len(v)}")
    for c in v:
        if not isinstance(c, int) or not 0 <= c < p:
            raise DomainError(f"{what} coefficient {c!r} not in [0, {p})")
    return v


def encode_seed(params: NmExtParams, y: Sequence[int]) -> tuple[int, ...]:
    """``y || y^2``."""
    y = _check_vec(params.p, y, params.seed_len, "seed")
    return y + vec_square(params.p, y)


def nmext_eval(params: NmExtParams, x: Sequence[int], y: Sequence[int]) -> int:
    x = _check_vec(params.p, x, params.n, "source")
    return inner_product(params.p, x, encode_seed(params, y))


def g_a_eval(params: NmExtParams, a: int, y: Sequence[int], y_prime: Sequence[int]) -> tuple[int, ...]:
    """``(y + a y') || (y^2 + a y'^2)``."""
    p = params.p
    if not isinstance(a, int) or not 0 < a < p:
        raise DomainError(f"a must be a nonzero element of F_{p}, got {a!r}")
    y = _check_vec(p, y, params.seed_len, "y")
    y_prime = _check_vec(p, y_prime, params.seed_len, "y'")
    lin = tuple((u + a * v) % p for u, v in zip(y, y_prime))
    quad = tuple((u + a * v) % p for u, v in zip(vec_square(p, y), vec_square(p, y_prime)))
    return lin + quad


def g_a_max_preimages(params: NmExtParams, a: int) -> int:
    """Largest number of off-diagonal pairs ``(y, y')`` sharing one image of g_a."""
    if params.num_seeds > MAX_SEEDS:
        raise ResourceError(f"{params.num_seeds} seeds exceed the enumeration limit", size=params.num_seeds)
    seeds = list(fp_vectors(params.p, params.seed_len))
    counts = Counter(
        g_a_eval(params, a, y, yp) for y in seeds for yp in seeds if y != yp
    )
    return max(counts.values(), default=0)


@dataclass(frozen=True)
class StrongExtParams:
    """Hash ``z = y*x1 + x2`` over F_{2^{n/2}}; ``v`` check bits, ``m`` key bits."""

    n: int
    m: int
    v: int = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n <= 0 or self.n % 2:
            raise DomainError(f"n must be a positive even integer, got {self.n!r}")
        if self.m < 0 or self.v < 0 or self.v + self.m > self.n // 2:
            raise DomainError(f"need m, v >= 0 and v + m <= n/2 (n={self.n}, m={self.m}, v={self.v})")

    @property
    def half(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class StrongExtOutput:
    z: tuple[int, ...]
    head: tuple[int, ...]
    tail: tuple[int, ...]


def strong_ext_eval(params: StrongExtParams, x1: Sequence[int], x2: Sequence[int], y: Sequence[int]) -> StrongExtOutput:
    """Evaluate the hash and split ``z`` into its first ``v`` bits and the next ``m``."""
    h = params.half
    spec = canonical_field(2, h)
    x1 = _check_vec(2, x1, h, "x1")
    x2 = _check_vec(2, x2, h, "x2")
    y = _check_vec(2, y, h, "seed")
    z = ext_add(spec, ext_mul(spec, y, x1), x2)
    return StrongExtOutput(z, z[: params.v], z[params.v : params.v + params.m])
