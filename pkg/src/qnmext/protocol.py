"""Privacy amplification over an adversarial channel.

Two protocols share one harness:

* ``dw`` -- two messages.  Alice sends a seed ``Y_A``; Bob answers with a
  fresh extractor seed ``Y_B`` and ``W = MAC(nmExt(X, Y'_A), Y_B)``; Alice
  accepts iff the tag verifies under her own ``nmExt(X, Y_A)``.
* ``one_round`` -- one message ``(Y, W)`` with ``Z = Y X1 + X2``, ``W`` the
  first ``v`` bits of ``Z`` and the key the next ``m`` bits.

The adversary is classical: a pair of tampering callables that see the
message in flight, a side-information value ``e`` drawn jointly with ``X``,
a private memory dict and their own random stream.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .errors import AdversaryError, DomainError, ResourceError
from .extractors import NmExtParams, StrongExtParams, nmext_eval, strong_ext_eval
from .field import FpVector, coeffs_to_int, fp_vectors, int_to_coeffs
from .mac import MacParams, bits_to_message, blocks_for, mac_key_derive, mac_tag, mac_verify

WIRE_VERSION = 0x01
MAX_ATOMS = 1 << 24

Bits = tuple[int, ...]


# -- parameters --------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolParams:
    """Constants for either protocol.

    In ``dw`` mode ``X`` lives in F_p^n and ``d2`` is the bit length of Bob's
    seed.  In ``one_round`` mode ``X`` is an ``n``-bit string and ``p``,
    ``d2``, ``t`` are unused.
    """

    p: int = 3
    n: int = 2
    d2: int = 2
    t: int = 2
    m: int = 1
    v: int = 0
    k: float | None = None
    eps_mac: Fraction = Fraction(0)
    eps_ext: Fraction = Fraction(0)
    eps_nmext: Fraction = Fraction(0)
    mode: str = "dw"

    def __post_init__(self):
        if self.mode == "dw":
            NmExtParams(self.p, self.n)
            if self.d2 < 1 or self.t < 1:
                raise DomainError("d2 and t must be positive")
            if not 0 <= self.m <= self.d2 or self.v:
                raise DomainError("dw mode needs 0 <= m <= d2 and v = 0")
        elif self.mode == "one_round":
            StrongExtParams(self.n, self.m, self.v)
        else:
            raise DomainError(f"unknown protocol mode {self.mode!r}")

    @classmethod
    def one_round(cls, n: int, k: float, eps: Fraction) -> "ProtocolParams":
        """``v = n - k + log(1/eps)`` (rounded up, clipped to ``[0, n/2]``), ``m = n/2 - v``."""
        v = math.ceil(n - k + math.log2(1 / eps) - 1e-12)
        v = min(max(v, 0), n // 2)
        return cls(n=n, m=n // 2 - v, v=v, k=k, eps_ext=Fraction(eps), mode="one_round")

    @property
    def nm(self) -> NmExtParams:
        return NmExtParams(self.p, self.n)

    @property
    def mac(self) -> MacParams:
        return MacParams(self.t, blocks_for(self.d2, self.t), key_space=self.p)

    @property
    def ext(self) -> StrongExtParams:
        if self.mode == "dw":
            return StrongExtParams(2 * self.d2, self.m, 0)
        return StrongExtParams(self.n, self.m, self.v)

    @property
    def seed_len(self) -> int:
        return self.n // 2

    @property
    def mac_key_space_ok(self) -> bool:
        """Whether ``d_Z = p`` covers the full MAC key space ``2^{2t}``."""
        return self.p >= 1 << (2 * self.t)

    @property
    def eps_total(self) -> Fraction:
        return self.eps_ext + self.eps_nmext + self.eps_mac

    def source_values(self) -> list[tuple[int, ...]]:
        if self.mode == "dw":
            return list(fp_vectors(self.p, self.n))
        return list(fp_vectors(2, self.n))


# -- randomness --------------------------------------------------------------

def rng_for(seed: int, role: str, trial: int = 0) -> random.Random:
    """Independent stream per (master seed, role, trial)."""
    digest = hashlib.sha256(f"{seed}:{role}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "little"))


# -- sources -----------------------------------------------------------------

@dataclass
class Source:
    """Exact joint pmf over ``(x, e)``."""

    pmf: dict

    def __post_init__(self):
        self.pmf = {k: Fraction(v) for k, v in self.pmf.items() if v}
        if any(v < 0 for v in self.pmf.values()):
            raise DomainError("negative probability")
        if sum(self.pmf.values()) != 1:
            raise DomainError("source pmf must sum to 1")
        self._atoms = sorted(self.pmf.items(), key=lambda kv: repr(kv[0]))

    @classmethod
    def uniform(cls, values: Iterable, e=0) -> "Source":
        values = list(values)
        return cls({(x, e): Fraction(1, len(values)) for x in values})

    @classmethod
    def constant(cls, x, e=0) -> "Source":
        return cls({(tuple(x), e): Fraction(1)})

    @classmethod
    def with_leak(cls, px: dict, leak: Callable) -> "Source":
        return cls({(x, leak(x)): pr for x, pr in px.items()})

    def atoms(self):
        return list(self._atoms)

    def sample(self, rng: random.Random):
        denom = math.lcm(*(v.denominator for v in self.pmf.values()))
        r = rng.randrange(denom)
        for (xe, pr) in self._atoms:
            w = pr.numerator * (denom // pr.denominator)
            if r < w:
                return xe
            r -= w
        raise AssertionError("pmf does not sum to 1")  # pragma: no cover

    def x_marginal(self) -> dict:
        out = defaultdict(Fraction)
        for (x, _), pr in self.pmf.items():
            out[x] += pr
        return dict(out)


# -- adversary ---------------------------------------------------------------

@dataclass
class AdversaryContext:
    e: Any
    rng: random.Random
    memory: dict = field(default_factory=dict)
    leaked: Any = None


Tamper = Callable[[Any, AdversaryContext], Any]


def _identity(message, ctx):
    return message


@dataclass
class AdversaryStrategy:
    """Classical tampering maps ``tamper(message, ctx) -> message'``.

    In ``dw`` runs ``tamper1`` sees ``Y_A`` and ``tamper2`` sees ``(Y_B, W)``;
    in ``one_round`` runs only ``tamper1`` is used, on ``(Y, W)``.  With
    post-application robustness ``ctx.leaked`` carries the key already output
    (``R_B`` before message two in ``dw``, ``R_A`` in ``one_round``).
    """

    tamper1: Tamper = _identity
    tamper2: Tamper = _identity
    name: str = "identity"


IDENTITY = AdversaryStrategy()


def seed_map_adversary(f1: Callable, f2: Callable | None = None, name: str = "") -> AdversaryStrategy:
    """Deterministic strategy from plain maps.

    ``f1(ya, e) -> ya'`` and ``f2(ya, yb, w, e) -> (yb', w')``; the second map
    gets the intercepted ``Y_A`` from memory.
    """
    def t1(msg, ctx):
        ctx.memory["ya"] = msg
        return f1(msg, ctx.e)

    def t2(msg, ctx):
        if f2 is None:
            return msg
        yb, w = msg
        return f2(ctx.memory["ya"], yb, w, ctx.e)

    return AdversaryStrategy(t1, t2, name or "seed-map")


# -- transcript --------------------------------------------------------------

@dataclass
class TranscriptRecord:
    """Messages as sent and as received, plus outputs (``None`` is reject).

    For one-round runs ``ya``/``w`` hold Alice's ``(Y, W)`` and
    ``ya_prime``/``w_prime`` what Bob received; ``yb`` fields stay ``None``,
    ``key_derived`` means Alice output a key and ``key_confirmed`` that Bob
    accepted.
    """

    ya: Bits | None = None
    ya_prime: Bits | None = None
    yb: Bits | None = None
    w: Bits | None = None
    yb_prime: Bits | None = None
    w_prime: Bits | None = None
    r_a: Bits | None = None
    r_b: Bits | None = None
    key_derived: bool = False
    key_confirmed: bool = False

    FIELDS = ("ya", "ya_prime", "yb", "w", "yb_prime", "w_prime", "r_a", "r_b", "key_derived", "key_confirmed")

    def to_json(self) -> dict:
        out = {}
        for name in self.FIELDS:
            val = getattr(self, name)
            out[name] = list(val) if isinstance(val, tuple) else val
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    @classmethod
    def from_json(cls, doc: dict) -> "TranscriptRecord":
        kw = {}
        for name in cls.FIELDS:
            val = doc[name]
            kw[name] = tuple(val) if isinstance(val, list) else val
        return cls(**kw)

    def view(self) -> tuple:
        """Everything that crossed the channel."""
        return (self.ya, self.ya_prime, self.yb, self.w, self.yb_prime, self.w_prime)


# -- wire format -------------------------------------------------------------

def pack_bits(bits: Sequence[int]) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i // 8] |= 1 << (i % 8)
    return bytes(out)


def unpack_bits(data: bytes, count: int) -> Bits:
    if len(data) != (count + 7) // 8:
        raise DomainError(f"expected {(count + 7) // 8} bytes for {count} bits")
    bits = tuple((data[i // 8] >> (i % 8)) & 1 for i in range(8 * len(data)))
    if any(bits[count:]):
        raise DomainError("nonzero padding bits")
    return bits[:count]


def encode_message1(params: ProtocolParams, ya: Sequence[int]) -> bytes:
    return bytes([WIRE_VERSION]) + FpVector(params.p, ya).to_bytes()


def decode_message1(params: ProtocolParams, data: bytes) -> Bits:
    if not data or data[0] != WIRE_VERSION:
        raise DomainError("unknown wire version")
    vec = FpVector.from_bytes(params.p, data[1:])
    if vec.n != params.seed_len:
        raise DomainError(f"seed has length {vec.n}, expected {params.seed_len}")
    return vec.coeffs


def encode_message2(params: ProtocolParams, yb: Sequence[int], w: Sequence[int]) -> bytes:
    return bytes([WIRE_VERSION]) + pack_bits(tuple(yb) + tuple(w))


def decode_message2(params: ProtocolParams, data: bytes) -> tuple[Bits, Bits]:
    if not data or data[0] != WIRE_VERSION:
        raise DomainError("unknown wire version")
    bits = unpack_bits(data[1:], params.d2 + params.t)
    return bits[: params.d2], bits[params.d2 :]


# -- Protocol DW -------------------------------------------------------------

def ext_input(params: ProtocolParams, x: Sequence[int]) -> tuple[Bits, Bits]:
    """Split ``X`` in F_p^n into two ``d2``-bit field elements for the strong extractor.

    ``X`` is read as its base-p index; bits beyond ``2 d2`` are dropped.
    """
    idx = coeffs_to_int(params.p, x) % (1 << (2 * params.d2))
    bits = int_to_coeffs(2, idx, 2 * params.d2)
    return bits[: params.d2], bits[params.d2 :]


def dw_extract(params: ProtocolParams, x: Sequence[int], yb: Sequence[int]) -> Bits:
    x1, x2 = ext_input(params, x)
    return strong_ext_eval(params.ext, x1, x2, yb).tail


def dw_tag(params: ProtocolParams, z: int, yb: Sequence[int]) -> Bits:
    mac = params.mac
    key = mac_key_derive(z, mac)
    return int_to_coeffs(2, mac_tag(mac, key, bits_to_message(mac, yb)), params.t)


def dw_verify(params: ProtocolParams, z: int, yb: Sequence[int], w: Sequence[int]) -> bool:
    mac = params.mac
    return mac_verify(mac, mac_key_derive(z, mac), bits_to_message(mac, yb), coeffs_to_int(2, w))


@dataclass
class AliceState:
    params: ProtocolParams
    x: Bits
    ya: Bits
    z: int


@dataclass
class BobOutput:
    r_b: Bits
    yb: Bits
    w: Bits
    z_prime: int


def _check_seed(params: ProtocolParams, y) -> Bits:
    y = tuple(y)
    if len(y) != params.seed_len or any(not isinstance(c, int) or not 0 <= c < params.p for c in y):
        raise DomainError(f"seed must be {params.seed_len} elements of F_{params.p}")
    return y


def _check_bits(bits, count: int, what: str) -> Bits:
    bits = tuple(bits)
    if len(bits) != count or any(b not in (0, 1) for b in bits):
        raise DomainError(f"{what} must be {count} bits")
    return bits


def alice_start(params: ProtocolParams, x: Sequence[int], ya: Sequence[int]) -> AliceState:
    x, ya = tuple(x), _check_seed(params, ya)
    return AliceState(params, x, ya, nmext_eval(params.nm, x, ya))


def alice_round1(params: ProtocolParams, x: Sequence[int], rng: random.Random) -> tuple[AliceState, Bits]:
    ya = tuple(rng.randrange(params.p) for _ in range(params.seed_len))
    state = alice_start(params, x, ya)
    return state, state.ya


def bob_answer(params: ProtocolParams, x: Sequence[int], ya_prime: Sequence[int], yb: Sequence[int]) -> BobOutput:
    ya_prime = _check_seed(params, ya_prime)
    yb = _check_bits(yb, params.d2, "Y_B")
    z_prime = nmext_eval(params.nm, x, ya_prime)
    return BobOutput(dw_extract(params, x, yb), yb, dw_tag(params, z_prime, yb), z_prime)


def bob_respond(params: ProtocolParams, x: Sequence[int], ya_prime: Sequence[int], rng: random.Random) -> BobOutput:
    yb = tuple(rng.randrange(2) for _ in range(params.d2))
    return bob_answer(params, x, ya_prime, yb)


def alice_finish(state: AliceState, yb_prime: Sequence[int], w_prime: Sequence[int]) -> Bits | None:
    params = state.params
    yb_prime = _check_bits(yb_prime, params.d2, "Y_B'")
    w_prime = _check_bits(w_prime, params.t, "W'")
    if not dw_verify(params, state.z, yb_prime, w_prime):
        return None
    return dw_extract(params, state.x, yb_prime)


def execute_dw(
    params: ProtocolParams,
    x: Sequence[int],
    e: Any,
    ya: Sequence[int],
    yb: Sequence[int],
    adversary: AdversaryStrategy = IDENTITY,
    adv_rng: random.Random | None = None,
    post_application: bool = False,
) -> TranscriptRecord:
    """One DW run with all honest randomness fixed."""
    ctx = AdversaryContext(e, adv_rng or random.Random(0))
    alice = alice_start(params, x, ya)
    ya_prime = adversary.tamper1(alice.ya, ctx)
    try:
        ya_prime = _check_seed(params, ya_prime)
    except DomainError as exc:
        raise AdversaryError(f"tamper1 output invalid: {exc}") from exc
    bob = bob_answer(params, x, ya_prime, yb)
    if post_application:
        ctx.leaked = bob.r_b
    out = adversary.tamper2((bob.yb, bob.w), ctx)
    try:
        yb_prime, w_prime = out
        yb_prime = _check_bits(yb_prime, params.d2, "Y_B'")
        w_prime = _check_bits(w_prime, params.t, "W'")
    except (DomainError, TypeError, ValueError) as exc:
        raise AdversaryError(f"tamper2 output invalid: {exc}") from exc
    r_a = alice_finish(alice, yb_prime, w_prime)
    return TranscriptRecord(
        ya=alice.ya, ya_prime=ya_prime, yb=bob.yb, w=bob.w, yb_prime=yb_prime, w_prime=w_prime,
        r_a=r_a, r_b=bob.r_b, key_derived=True, key_confirmed=r_a is not None,
    )


def run_dw(
    params: ProtocolParams,
    source: Source,
    adversary: AdversaryStrategy = IDENTITY,
    seed: int = 0,
    trial: int = 0,
    post_application: bool = False,
) -> TranscriptRecord:
    x, e = source.sample(rng_for(seed, "source", trial))
    alice_rng = rng_for(seed, "alice", trial)
    bob_rng = rng_for(seed, "bob", trial)
    ya = tuple(alice_rng.randrange(params.p) for _ in range(params.seed_len))
    yb = tuple(bob_rng.randrange(2) for _ in range(params.d2))
    return execute_dw(params, x, e, ya, yb, adversary, rng_for(seed, "adversary", trial), post_application)


# -- one-round protocol ------------------------------------------------------

def _split_source(params: ProtocolParams, x: Sequence[int]) -> tuple[Bits, Bits]:
    x = _check_bits(x, params.n, "X")
    h = params.n // 2
    return x[:h], x[h:]


def one_round_send(params: ProtocolParams, x: Sequence[int], y: Sequence[int]) -> tuple[Bits, Bits, Bits]:
    """Alice's message ``(Y, W)`` and her key ``R_A``."""
    x1, x2 = _split_source(params, x)
    out = strong_ext_eval(params.ext, x1, x2, y)
    return tuple(y), out.head, out.tail


def one_round_receive(params: ProtocolParams, x: Sequence[int], y_prime: Sequence[int], w_prime: Sequence[int]) -> Bits | None:
    x1, x2 = _split_source(params, x)
    out = strong_ext_eval(params.ext, x1, x2, y_prime)
    if tuple(w_prime) != out.head:
        return None
    return out.tail


def execute_one_round(
    params: ProtocolParams,
    x: Sequence[int],
    e: Any,
    y: Sequence[int],
    adversary: AdversaryStrategy = IDENTITY,
    adv_rng: random.Random | None = None,
    post_application: bool = False,
) -> TranscriptRecord:
    ctx = AdversaryContext(e, adv_rng or random.Random(0))
    y, w, r_a = one_round_send(params, x, y)
    if post_application:
        ctx.leaked = r_a
    out = adversary.tamper1((y, w), ctx)
    h = params.n // 2
    try:
        y_prime, w_prime = out
        y_prime = _check_bits(y_prime, h, "Y'")
        w_prime = _check_bits(w_prime, params.v, "W'")
    except (DomainError, TypeError, ValueError) as exc:
        raise AdversaryError(f"tamper output invalid: {exc}") from exc
    r_b = one_round_receive(params, x, y_prime, w_prime)
    return TranscriptRecord(
        ya=y, ya_prime=y_prime, w=w, w_prime=w_prime, r_a=r_a, r_b=r_b,
        key_derived=True, key_confirmed=r_b is not None,
    )


def run_one_round(
    params: ProtocolParams,
    source: Source,
    adversary: AdversaryStrategy = IDENTITY,
    seed: int = 0,
    trial: int = 0,
    post_application: bool = False,
) -> TranscriptRecord:
    x, e = source.sample(rng_for(seed, "source", trial))
    alice_rng = rng_for(seed, "alice", trial)
    y = tuple(alice_rng.randrange(2) for _ in range(params.n // 2))
    return execute_one_round(params, x, e, y, adversary, rng_for(seed, "adversary", trial), post_application)


# -- security experiment -----------------------------------------------------

def _frac_json(q):
    if q is None:
        return None
    return {"exact": f"{q.numerator}/{q.denominator}", "value": float(q)}


@dataclass
class SecurityReport:
    protocol: str
    mode: str
    atoms: int
    correctness: Fraction
    robustness_pre: Fraction
    robustness_post: Fraction
    extraction_a: Fraction | None
    extraction_b: Fraction | None
    keyconfirmed_changed: Fraction
    mac_forgeries: Fraction
    same_seed_forgeries: Fraction
    aborted: int
    eps_bound: Fraction
    mac_key_space_ok: bool
    notes: list = field(default_factory=list)

    @property
    def forgery_discrepancy(self) -> Fraction:
        return self.keyconfirmed_changed - self.mac_forgeries

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "protocol": self.protocol,
            "mode": self.mode,
            "atoms": self.atoms,
            "correctness": _frac_json(self.correctness),
            "robustness_pre": _frac_json(self.robustness_pre),
            "robustness_post": _frac_json(self.robustness_post),
            "extraction_a": _frac_json(self.extraction_a),
            "extraction_b": _frac_json(self.extraction_b),
            "keyconfirmed_changed": _frac_json(self.keyconfirmed_changed),
            "mac_forgeries": _frac_json(self.mac_forgeries),
            "same_seed_forgeries": _frac_json(self.same_seed_forgeries),
            "forgery_discrepancy": _frac_json(self.forgery_discrepancy),
            "aborted": self.aborted,
            "eps_bound_sum": _frac_json(self.eps_bound),
            "mac_key_space_ok": self.mac_key_space_ok,
            "notes": list(self.notes),
        }


def _robust_fail(rec: TranscriptRecord) -> bool:
    return rec.r_a is not None and rec.r_b is not None and rec.r_a != rec.r_b


def _correct(rec: TranscriptRecord) -> bool:
    return rec.r_a is not None and rec.r_a == rec.r_b


def _purify_distance(joint: dict, m: int) -> Fraction:
    """Distance of ``(R, V, E)`` from ``(purify(R), V, E)``; ``joint`` maps ``(r, view) -> prob``."""
    by_view = defaultdict(dict)
    for (r, view), pr in joint.items():
        by_view[view][r] = by_view[view].get(r, Fraction(0)) + pr
    keys = [tuple(b) for b in fp_vectors(2, m)]
    total = Fraction(0)
    for rs in by_view.values():
        accepted = sum((pr for r, pr in rs.items() if r is not None), Fraction(0))
        share = accepted / len(keys)
        for r in keys:
            total += abs(rs.get(r, Fraction(0)) - share)
    return total / 2


def _dw_atoms(params: ProtocolParams, source: Source):
    seeds = list(fp_vectors(params.p, params.seed_len))
    ybs = list(fp_vectors(2, params.d2))
    scale = Fraction(1, len(seeds) * len(ybs))
    for (x, e), pr in source.atoms():
        for ya in seeds:
            for yb in ybs:
                yield (x, e, ya, yb), pr * scale


def _one_round_atoms(params: ProtocolParams, source: Source):
    ys = list(fp_vectors(2, params.n // 2))
    scale = Fraction(1, len(ys))
    for (x, e), pr in source.atoms():
        for y in ys:
            yield (x, e, y), pr * scale


def security_experiment(
    params: ProtocolParams,
    source: Source,
    adversary: AdversaryStrategy = IDENTITY,
    mode: str = "exhaustive",
    trials: int = 1000,
    seed: int = 0,
) -> SecurityReport:
    """Correctness, robustness (pre- and post-application) and extraction.

    ``exhaustive`` enumerates every honest random choice with its exact
    weight; the adversary's stream is derived from ``(seed, atom index)``.
    ``monte_carlo`` samples ``trials`` runs and leaves extraction unset.
    """
    dw = params.mode == "dw"
    if mode == "exhaustive":
        per_source = (params.p**params.seed_len * 2**params.d2) if dw else 2 ** (params.n // 2)
        size = len(source.pmf) * per_source
        if size > MAX_ATOMS:
            raise ResourceError(f"{size} atoms exceed the exhaustive limit", size=size)
        atoms = list(_dw_atoms(params, source) if dw else _one_round_atoms(params, source))
    elif mode == "monte_carlo":
        atoms = None
    else:
        raise DomainError(f"unknown mode {mode!r}")

    def run(index, atom, post):
        adv_rng = rng_for(seed, "adversary", index)
        if dw:
            x, e, ya, yb = atom
            return execute_dw(params, x, e, ya, yb, adversary, adv_rng, post)
        x, e, y = atom
        return execute_one_round(params, x, e, y, adversary, adv_rng, post)

    def draws():
        if atoms is not None:
            yield from enumerate(atoms)
            return
        weight = Fraction(1, trials)
        for i in range(trials):
            x, e = source.sample(rng_for(seed, "source", i))
            if dw:
                ya = tuple(rng_for(seed, "alice", i).randrange(params.p) for _ in range(params.seed_len))
                yb = tuple(rng_for(seed, "bob", i).randrange(2) for _ in range(params.d2))
                yield i, ((x, e, ya, yb), weight)
            else:
                y = tuple(rng_for(seed, "alice", i).randrange(2) for _ in range(params.n // 2))
                yield i, ((x, e, y), weight)

    zero = Fraction(0)
    correct = pre = post = changed = forged = same_seed = zero
    aborted = 0
    joint_a, joint_b = defaultdict(Fraction), defaultdict(Fraction)
    count = 0
    for index, (atom, weight) in draws():
        count += 1
        try:
            rec = run(index, atom, False)
            rec_post = run(index, atom, True)
        except AdversaryError:
            aborted += 1
            continue
        if _correct(rec):
            correct += weight
        if _robust_fail(rec):
            pre += weight
        if _robust_fail(rec_post):
            post += weight
        if dw:
            x, e = atom[0], atom[1]
            msg_changed = (rec.yb_prime, rec.w_prime) != (rec.yb, rec.w)
            if rec.key_confirmed and msg_changed:
                changed += weight
            # independent tally straight from the MAC module
            mac = params.mac
            key = mac_key_derive(nmext_eval(params.nm, x, rec.ya), mac)
            if msg_changed and mac_verify(mac, key, bits_to_message(mac, rec.yb_prime), coeffs_to_int(2, rec.w_prime)):
                forged += weight
                if rec.ya_prime == rec.ya:
                    same_seed += weight
        if atoms is not None:
            view = (rec.view(), atom[1])
            joint_a[rec.r_a, view] += weight
            joint_b[rec.r_b, view] += weight

    notes = []
    if dw and not params.mac_key_space_ok:
        notes.append(f"d_Z = p = {params.p} < 2^(2t) = {1 << 2 * params.t}: MAC keys are not full-entropy")
    return SecurityReport(
        protocol=params.mode,
        mode=mode,
        atoms=count,
        correctness=correct,
        robustness_pre=pre,
        robustness_post=post,
        extraction_a=_purify_distance(joint_a, params.m) if atoms is not None else None,
        extraction_b=_purify_distance(joint_b, params.m) if atoms is not None else None,
        keyconfirmed_changed=changed,
        mac_forgeries=forged,
        same_seed_forgeries=same_seed,
        aborted=aborted,
        eps_bound=params.eps_total,
        mac_key_space_ok=params.mac_key_space_ok if dw else True,
        notes=notes,
    )
