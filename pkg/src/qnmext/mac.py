"""One-time MAC by polynomial evaluation over F_{2^t}.

Field elements are integers in ``[0, 2^t)``; bit ``i`` is the coefficient of
``x^i``.  ``tag = k2 + sum_i m_i * k1^i`` for a message of ``L`` blocks.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, ResourceError
from .field import canonical_field, coeffs_to_int, ext_mul, int_to_coeffs

ENUMERATION_LIMIT = 1 << 24


@dataclass(frozen=True)
class MacParams:
    t: int
    L: int
    key_space: int | None = None

    def __post_init__(self):
        if self.t < 1 or self.L < 1:
            raise DomainError("t and L must be positive")
        if self.key_space is None:
            object.__setattr__(self, "key_space", 1 << (2 * self.t))
        if self.key_space < 1:
            raise DomainError("key space must be nonempty")

    @property
    def d(self) -> int:
        return self.L * self.t

    @property
    def full_key_space(self) -> bool:
        """Whether d_Z covers both F_{2^t} key halves."""
        return self.key_space >= 1 << (2 * self.t)

    @property
    def eps(self) -> Fraction:
        return Fraction(self.L, 1 << self.t)


@dataclass(frozen=True)
class MacKey:
    k1: int
    k2: int


def mac_key_derive(z: int, params: MacParams) -> MacKey:
    """Split ``z mod 2^{2t}`` into ``k1`` (low ``t`` bits) and ``k2`` (high ``t`` bits)."""
    if isinstance(z, bool) or not isinstance(z, int) or z < 0:
        raise DomainError(f"key index must be a non-negative integer, got {z!r}")
    z %= 1 << (2 * params.t)
    mask = (1 << params.t) - 1
    return MacKey(z & mask, z >> params.t)


def key_derivation_bias(params: MacParams) -> Fraction:
    """Statistical distance of the derived key from uniform, for uniform ``z``."""
    size = 1 << (2 * params.t)
    counts = [0] * size
    for z in range(params.key_space):
        counts[z % size] += 1
    return sum(abs(Fraction(c, params.key_space) - Fraction(1, size)) for c in counts) / 2


def _gf_mul(t: int, a: int, b: int) -> int:
    spec = canonical_field(2, t)
    return coeffs_to_int(2, ext_mul(spec, int_to_coeffs(2, a, t), int_to_coeffs(2, b, t)))


def _check_block(params: MacParams, value, what: str) -> int:
    if not isinstance(value, int) or not 0 <= value < 1 << params.t:
        raise DomainError(f"{what} {value!r} is not an element of F_2^{params.t}")
    return value


def mac_tag(params: MacParams, key: MacKey, message: Sequence[int]) -> int:
    if len(message) != params.L:
        raise DomainError(f"message must have {params.L} blocks, got {len(message)}")
    k1 = _check_block(params, key.k1, "k1")
    tag = _check_block(params, key.k2, "k2")
    power = 1
    for block in message:
        power = _gf_mul(params.t, power, k1)
        tag ^= _gf_mul(params.t, _check_block(params, block, "block"), power)
    return tag


def mac_verify(params: MacParams, key: MacKey, message: Sequence[int], tag: int) -> bool:
    return mac_tag(params, key, message) == tag


def bits_to_message(params: MacParams, bits: Sequence[int]) -> tuple[int, ...]:
    """Pack a bit string into ``L`` blocks of ``t`` bits, zero padded."""
    if len(bits) > params.d:
        raise DomainError(f"{len(bits)} bits do not fit in {params.L} blocks of {params.t}")
    padded = list(bits) + [0] * (params.d - len(bits))
    return tuple(
        coeffs_to_int(2, padded[i * params.t : (i + 1) * params.t]) for i in range(params.L)
    )


def blocks_for(bits: int, t: int) -> int:
    return max(1, math.ceil(bits / t))


def mac_forgery_advantage(params: MacParams) -> Fraction:
    """Best one-time forgery probability over uniform keys, by exhaustion.

    For each message ``m`` the optimal adversary maps each observed tag to the
    forgery ``(m', tag')`` consistent with the most keys, so the advantage is
    ``max_m sum_tag max_{m' != m, tag'} #keys / #keys``.
    """
    t, L = params.t, params.L
    num_keys = 1 << (2 * t)
    num_msgs = 1 << params.d
    if num_keys * num_msgs * num_msgs > ENUMERATION_LIMIT:
        raise ResourceError("forgery enumeration too large", size=num_keys * num_msgs * num_msgs)
    messages = [tuple((m >> (i * t)) & ((1 << t) - 1) for i in range(L)) for m in range(num_msgs)]
    keys = [MacKey(k & ((1 << t) - 1), k >> t) for k in range(num_keys)]
    table = [[mac_tag(params, key, msg) for msg in messages] for key in keys]
    best = 0
    for mi in range(num_msgs):
        by_tag = defaultdict(lambda: defaultdict(int))
        for row in table:
            seen = row[mi]
            bucket = by_tag[seen]
            for mj in range(num_msgs):
                if mj != mi:
                    bucket[mj, row[mj]] += 1
        wins = sum(max(bucket.values()) for bucket in by_tag.values())
        best = max(best, wins)
    return Fraction(best, num_keys)
