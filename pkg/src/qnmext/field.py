"""Exact arithmetic over F_p and F_{p^k}.

Elements of F_{p^k} are coefficient tuples ``(c_0, ..., c_{k-1})`` of the
polynomial ``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` reduced modulo a fixed monic
irreducible.  The irreducible is always the lexicographically smallest one
(coefficients compared constant term first), so the identification of a
vector in F_p^k with a field element is the identity on coefficients and is
reproducible.
"""

from __future__ import annotations

import functools
import itertools
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError

MAX_PRIME = 1 << 16
SCAN_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise DomainError(f"modulus {self.p!r} is not prime")
        if self.p >= MAX_PRIME:
            raise DomainError(f"prime {self.p} exceeds the supported range p < 2^16")


def _check_element(p: int, a: int) -> int:
    if not isinstance(a, int) or not 0 <= a < p:
        raise DomainError(f"{a!r} is not an element of F_{p}")
    return a


def fp_arith(spec: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Apply ``op`` (add, sub, mul, inv) in F_p."""
    p = spec.p
    _check_element(p, a)
    if op == "inv":
        if b is not None:
            raise DomainError("inv takes a single operand")
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, p - 2, p)
    if b is None:
        raise DomainError(f"{op} needs two operands")
    _check_element(p, b)
    if op == "add":
        return (a + b) % p
    if op == "sub":
        return (a - b) % p
    if op == "mul":
        return (a * b) % p
    raise DomainError(f"unknown field operation {op!r}")


# -- polynomials over F_p, coefficient lists constant term first -------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(p: int, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def poly_rem(p: int, a: Sequence[int], m: Sequence[int]) -> list[int]:
    """Remainder of ``a`` modulo ``m`` (``m`` need not be monic, but nonzero)."""
    m = _trim(list(m))
    if not m:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim([c % p for c in a])
    dm = len(m) - 1
    lead_inv = pow(m[-1], p - 2, p)
    while len(r) - 1 >= dm and r:
        coef = (r[-1] * lead_inv) % p
        shift = len(r) - 1 - dm
        for i, mi in enumerate(m):
            r[shift + i] = (r[shift + i] - coef * mi) % p
        _trim(r)
    return r


def _is_irreducible(p: int, poly: Sequence[int]) -> bool:
    k = len(poly) - 1
    if k == 1:
        return True
    # a root means a linear factor; cheap rejection before trial division
    for r in range(p):
        if sum(c * pow(r, i, p) for i, c in enumerate(poly)) % p == 0:
            return False
    for d in range(2, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not poly_rem(p, poly, list(low) + [1]):
                return False
    return True


@functools.lru_cache(maxsize=None)
def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ``k`` over F_p, leading 1 included."""
    FieldSpec(p)
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"extension degree must be >= 1, got {k!r}")
    if p**k > SCAN_LIMIT:
        raise ResourceError(f"p^k = {p}^{k} exceeds scan limit 2^20", size=p**k)
    for low in itertools.product(range(p), repeat=k):
        poly = low + (1,)
        if _is_irreducible(p, poly):
            return poly
    raise AssertionError("an irreducible of every degree exists")  # pragma: no cover


@dataclass(frozen=True)
class ExtFieldSpec:
    base: FieldSpec
    k: int
    irreducible: tuple[int, ...]

    def __post_init__(self):
        p = self.base.p
        poly = tuple(self.irreducible)
        object.__setattr__(self, "irreducible", poly)
        if len(poly) != self.k + 1 or poly[-1] != 1:
            raise DomainError("irreducible must be monic of degree k")
        if any(not 0 <= c < p for c in poly):
            raise DomainError("irreducible coefficients must lie in [0, p)")
        if not _is_irreducible(p, poly):
            raise DomainError(f"{poly} is reducible over F_{p}")

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def order(self) -> int:
        return self.base.p**self.k

    @property
    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.k - 1)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.k


@functools.lru_cache(maxsize=None)
def canonical_field(p: int, k: int) -> ExtFieldSpec:
    return ExtFieldSpec(FieldSpec(p), k, find_irreducible(p, k))


def _check_coeffs(spec: ExtFieldSpec, a: Sequence[int]) -> tuple[int, ...]:
    a = tuple(a)
    if len(a) != spec.k:
        raise DomainError(f"expected {spec.k} coefficients, got {len(a)}")
    p = spec.p
    for c in a:
        if not isinstance(c, int) or not 0 <= c < p:
            raise DomainError(f"coefficient {c!r} not in [0, {p})")
    return a


def _pad(r: Sequence[int], k: int) -> tuple[int, ...]:
    return tuple(r) + (0,) * (k - len(r))


def ext_add(spec: ExtFieldSpec, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    a, b = _check_coeffs(spec, a), _check_coeffs(spec, b)
    return tuple((x + y) % spec.p for x, y in zip(a, b))


def ext_scale(spec: ExtFieldSpec, c: int, a: Sequence[int]) -> tuple[int, ...]:
    _check_element(spec.p, c)
    return tuple((c * x) % spec.p for x in _check_coeffs(spec, a))


def ext_mul(spec: ExtFieldSpec, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    a, b = _check_coeffs(spec, a), _check_coeffs(spec, b)
    return _pad(poly_rem(spec.p, poly_mul(spec.p, a, b), spec.irreducible), spec.k)


def ext_pow(spec: ExtFieldSpec, a: Sequence[int], e: int) -> tuple[int, ...]:
    result, base = spec.one, _check_coeffs(spec, a)
    while e:
        if e & 1:
            result = ext_mul(spec, result, base)
        base = ext_mul(spec, base, base)
        e >>= 1
    return result


def phi(p: int, x: Sequence[int]) -> tuple[int, ...]:
    """Map a vector of F_p^k into F_{p^k}; the identity on coefficients."""
    return _check_coeffs(canonical_field(p, len(x)), x)


def phi_inv(spec: ExtFieldSpec, a: Sequence[int]) -> tuple[int, ...]:
    return _check_coeffs(spec, a)


@functools.lru_cache(maxsize=1 << 16)
def _square(p: int, y: tuple[int, ...]) -> tuple[int, ...]:
    spec = canonical_field(p, len(y))
    return ext_mul(spec, y, y)


def vec_square(p: int, y: Sequence[int]) -> tuple[int, ...]:
    """Square of ``y`` in F_p^k, taken through the canonical F_{p^k}."""
    y = tuple(y)
    if not y:
        raise DomainError("cannot square an empty vector")
    return _square(p, y)


def inner_product(p: int, x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise DomainError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(a * b for a, b in zip(x, y)) % p


def fp_vectors(p: int, n: int) -> Iterable[tuple[int, ...]]:
    """All vectors of F_p^n in lexicographic order."""
    return itertools.product(range(p), repeat=n)


def coeffs_to_int(p: int, coeffs: Sequence[int]) -> int:
    """Base-p index of a coefficient vector, coefficient 0 least significant."""
    value = 0
    for c in reversed(coeffs):
        value = value * p + c
    return value


def int_to_coeffs(p: int, value: int, k: int) -> tuple[int, ...]:
    if not 0 <= value < p**k:
        raise DomainError(f"{value} does not fit in {k} base-{p} digits")
    out = []
    for _ in range(k):
        value, r = divmod(value, p)
        out.append(r)
    return tuple(out)


@dataclass(frozen=True)
class FpVector:
    """A vector of F_p^n with validated coefficients."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        for c in self.coeffs:
            if not isinstance(c, int) or not 0 <= c < self.p:
                raise DomainError(f"coefficient {c!r} not in [0, {self.p})")

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def to_bytes(self) -> bytes:
        """Length-prefixed little-endian u16 encoding."""
        if self.p >= MAX_PRIME or self.n >= MAX_PRIME:
            raise DomainError("serialization needs p < 2^16 and n < 2^16")
        return struct.pack(f"<H{self.n}H", self.n, *self.coeffs)

    @classmethod
    def from_bytes(cls, p: int, data: bytes) -> "FpVector":
        if len(data) < 2:
            raise DomainError("truncated FpVector encoding")
        (n,) = struct.unpack_from("<H", data)
        if len(data) != 2 + 2 * n:
            raise DomainError(f"expected {2 + 2 * n} bytes, got {len(data)}")
        return cls(p, struct.unpack_from(f"<{n}H", data, 2))

    def to_json(self) -> list[int]:
        return list(self.coeffs)
