"""Classical-quantum states and the collision-probability toolkit.

A cq state ``sum_x |x><x| (x) rho_E^x`` is stored as a stack of PSD blocks, one
per classical label.  Everything that is block diagonal in the classical
register is computed block by block, so a trace norm on ``X (x) E`` costs one
``d_E``-dimensional eigendecomposition per label.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DomainError, ResourceError
from .field import fp_vectors, inner_product

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
LEMMA_SLACK = 1e-9


def _as_blocks(blocks, ndim: int) -> np.ndarray:
    b = np.array(blocks, dtype=complex)
    if b.ndim != ndim or b.shape[-1] != b.shape[-2]:
        raise DomainError(f"expected blocks of shape (..., d, d) with {ndim} axes, got {b.shape}")
    return (b + np.conj(np.swapaxes(b, -1, -2))) / 2


def _validate(blocks: np.ndarray):
    total = float(np.real(np.trace(blocks, axis1=-2, axis2=-1)).sum())
    if abs(total - 1.0) > TRACE_TOL:
        raise DomainError(f"state has total trace {total}, expected 1")
    for blk in blocks.reshape(-1, *blocks.shape[-2:]):
        if _is_diag(blk):
            lo = float(np.min(np.real(np.diag(blk))))
        else:
            lo = linalg.min_eigenvalue(blk)
        if lo < -PSD_TOL:
            raise DomainError(f"block has negative eigenvalue {lo}")


def _is_diag(blk: np.ndarray) -> bool:
    return not np.any(blk - np.diag(np.diag(blk)))


@dataclass
class CqState:
    """``rho_XE`` as one ``d_E x d_E`` block per label of ``X``.

    When ``p`` and ``t`` are set, ``labels`` enumerate F_p^t in lexicographic
    order and the state can be fed to the XOR-lemma checks.
    """

    blocks: np.ndarray
    labels: tuple = None
    p: int | None = None
    t: int | None = None

    def __post_init__(self):
        self.blocks = _as_blocks(self.blocks, 3)
        if self.labels is None:
            self.labels = tuple(range(len(self.blocks)))
        self.labels = tuple(self.labels)
        if len(self.labels) != len(self.blocks):
            raise DomainError("one label per block required")
        _validate(self.blocks)

    @classmethod
    def over_field(cls, p: int, t: int, blocks) -> "CqState":
        return cls(blocks, tuple(fp_vectors(p, t)), p, t)

    @property
    def d_X(self) -> int:
        return len(self.blocks)

    @property
    def d_E(self) -> int:
        return self.blocks.shape[-1]

    @property
    def rho_E(self) -> np.ndarray:
        return self.blocks.sum(axis=0)

    @property
    def probs(self) -> np.ndarray:
        return np.real(np.trace(self.blocks, axis1=1, axis2=2))

    @property
    def is_diagonal(self) -> bool:
        return all(_is_diag(b) for b in self.blocks)

    def to_json(self) -> dict:
        return {
            "kind": "cq",
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
            "p": self.p,
            "t": self.t,
            "d_E": self.d_E,
            "blocks": _blocks_to_json(self.blocks),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CqState":
        labels = tuple(tuple(l) if isinstance(l, list) else l for l in doc["labels"])
        return cls(_blocks_from_json(doc["blocks"]), labels, doc.get("p"), doc.get("t"))


@dataclass
class CcqState:
    """``rho_{X0 X E}`` with blocks indexed ``[x0, x]``.

    The first register is the one compared against uniform in the
    non-uniform XOR lemma and the ccq collision identity.
    """

    blocks: np.ndarray
    labels0: tuple = None
    labels1: tuple = None
    p: int | None = None
    t: int | None = None

    def __post_init__(self):
        self.blocks = _as_blocks(self.blocks, 4)
        n0, n1 = self.blocks.shape[:2]
        self.labels0 = tuple(range(n0)) if self.labels0 is None else tuple(self.labels0)
        self.labels1 = tuple(range(n1)) if self.labels1 is None else tuple(self.labels1)
        if (len(self.labels0), len(self.labels1)) != (n0, n1):
            raise DomainError("label sets do not match block grid")
        _validate(self.blocks)

    @classmethod
    def over_field(cls, p: int, t: int, blocks) -> "CcqState":
        return cls(blocks, tuple(range(p)), tuple(fp_vectors(p, t)), p, t)

    @property
    def d_E(self) -> int:
        return self.blocks.shape[-1]

    @property
    def rho_E(self) -> np.ndarray:
        return self.blocks.sum(axis=(0, 1))

    def joint(self) -> CqState:
        """View as a cq state on the pair ``(x0, x)``."""
        n0, n1, d, _ = self.blocks.shape
        labels = tuple(itertools.product(self.labels0, self.labels1))
        return CqState(self.blocks.reshape(n0 * n1, d, d), labels)

    def second_marginal(self) -> CqState:
        """``rho_{X E}``, tracing out the first register."""
        return CqState(self.blocks.sum(axis=0), self.labels1, self.p, self.t)

    @property
    def is_diagonal(self) -> bool:
        return all(_is_diag(b) for b in self.blocks.reshape(-1, self.d_E, self.d_E))

    def to_json(self) -> dict:
        return {
            "kind": "ccq",
            "labels0": [list(l) if isinstance(l, tuple) else l for l in self.labels0],
            "labels1": [list(l) if isinstance(l, tuple) else l for l in self.labels1],
            "p": self.p,
            "t": self.t,
            "d_E": self.d_E,
            "blocks": [_blocks_to_json(row) for row in self.blocks],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CcqState":
        conv = lambda ls: tuple(tuple(l) if isinstance(l, list) else l for l in ls)
        blocks = np.array([_blocks_from_json(row) for row in doc["blocks"]])
        return cls(blocks, conv(doc["labels0"]), conv(doc["labels1"]), doc.get("p"), doc.get("t"))


def _blocks_to_json(blocks) -> list:
    return [[[[float(v.real), float(v.imag)] for v in row] for row in blk] for blk in blocks]


def _blocks_from_json(doc) -> np.ndarray:
    arr = np.array(doc, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def dump_state(state, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state.to_json(), fh)


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return (CcqState if doc.get("kind") == "ccq" else CqState).from_json(doc)


# -- random states -----------------------------------------------------------

def _gaussian_psd(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    a = rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))
    return a @ np.conj(np.swapaxes(a, 1, 2))


def _random_blocks(rng, count: int, d_E: int, classical: bool) -> np.ndarray:
    if classical:
        diag = rng.exponential(size=(count, d_E))
        blocks = np.zeros((count, d_E, d_E), dtype=complex)
        idx = np.arange(d_E)
        blocks[:, idx, idx] = diag
    else:
        blocks = _gaussian_psd(rng, count, d_E)
    return blocks / np.real(np.trace(blocks, axis1=1, axis2=2)).sum()


def random_cq_state(rng, d_X: int, d_E: int, classical: bool = False) -> CqState:
    """Blocks ``A_x A_x^dagger`` with standard complex Gaussian ``A_x``, normalized."""
    return CqState(_random_blocks(rng, d_X, d_E, classical))


def random_field_cq_state(rng, p: int, t: int, d_E: int, classical: bool = False) -> CqState:
    return CqState.over_field(p, t, _random_blocks(rng, p**t, d_E, classical))


def random_ccq_state(rng, p: int, t: int, d_E: int, classical: bool = False) -> CcqState:
    blocks = _random_blocks(rng, p * p**t, d_E, classical).reshape(p, p**t, d_E, d_E)
    return CcqState.over_field(p, t, blocks)


def classical_cq_state(pmf: dict, labels: Sequence, side: Sequence) -> CqState:
    """Diagonal cq state from a joint pmf ``{(x, e): prob}``."""
    blocks = np.zeros((len(labels), len(side), len(side)), dtype=complex)
    li = {l: i for i, l in enumerate(labels)}
    si = {e: j for j, e in enumerate(side)}
    for (x, e), pr in pmf.items():
        blocks[li[x], si[e], si[e]] += float(pr)
    return CqState(blocks, tuple(labels))


# -- distances ---------------------------------------------------------------

def _half_trace_norm(h: np.ndarray) -> float:
    if _is_diag(h):
        return 0.5 * float(np.sum(np.abs(np.real(np.diag(h)))))
    return 0.5 * linalg.trace_norm(h)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``.

    Accepts two matrices, or two cq states with identical labels (then the
    block structure is used).
    """
    if isinstance(rho, CcqState):
        rho = rho.joint()
    if isinstance(sigma, CcqState):
        sigma = sigma.joint()
    if isinstance(rho, CqState) and isinstance(sigma, CqState):
        if rho.blocks.shape != sigma.blocks.shape:
            raise DomainError("states have different shapes")
        return sum(_half_trace_norm(a - b) for a, b in zip(rho.blocks, sigma.blocks))
    a, b = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch {a.shape} vs {b.shape}")
    return _half_trace_norm(linalg.hermitian(a - b))


def distance_from_uniform(state: CqState) -> float:
    """``1/2 || rho_XE - U_X (x) rho_E ||_1``."""
    ref = state.rho_E / state.d_X
    return sum(_half_trace_norm(b - ref) for b in state.blocks)


def conditional_distance_from_uniform(state: CcqState) -> float:
    """``1/2 || rho_{X0 X E} - U_{X0} (x) rho_{X E} ||_1``."""
    n0 = state.blocks.shape[0]
    marg = state.blocks.sum(axis=0) / n0
    return sum(
        _half_trace_norm(state.blocks[i, j] - marg[j])
        for i in range(n0)
        for j in range(state.blocks.shape[1])
    )


def uniform_product(state: CqState) -> CqState:
    """``U_X (x) rho_E`` with the labels of ``state``."""
    blocks = np.broadcast_to(state.rho_E / state.d_X, state.blocks.shape)
    return CqState(blocks.copy(), state.labels, state.p, state.t)


# -- collision probability ---------------------------------------------------

@dataclass
class CollisionReport:
    gamma: float
    identity_lhs: float
    identity_rhs: float
    gamma_marginal: float | None = None

    @property
    def residual(self) -> float:
        return abs(self.identity_lhs - self.identity_rhs)

    @property
    def within_bound(self) -> bool:
        return self.gamma <= 1 + LEMMA_SLACK


def _tr_sandwich(a, s, b) -> float:
    """``Tr(a s b s)``, real for Hermitian arguments."""
    return float(np.real(np.trace(a @ s @ b @ s)))


def collision_prob(state) -> CollisionReport:
    """``Gamma_c(rho|rho_E)`` and the residual of the trace-to-collision identity.

    For a cq state the identity is
    ``Tr((rho_XE - U_X rho_E) rho_E^{-1/2})^2 = Gamma_c - 1/d_X``; for a ccq
    state ``rho_{X Z E}`` (first register ``X``) the right side becomes
    ``Gamma_c(rho_XZE) - Gamma_c(rho_ZE)/d_X``.
    """
    if isinstance(state, CcqState):
        s = linalg.inv_sqrt(state.rho_E)
        n0, n1 = state.blocks.shape[:2]
        marg = state.blocks.sum(axis=0)
        gamma = sum(_tr_sandwich(b, s, b) for b in state.blocks.reshape(-1, state.d_E, state.d_E))
        gamma_z = sum(_tr_sandwich(b, s, b) for b in marg)
        lhs = 0.0
        for i in range(n0):
            for j in range(n1):
                diff = state.blocks[i, j] - marg[j] / n0
                lhs += _tr_sandwich(diff, s, diff)
        return CollisionReport(gamma, lhs, gamma - gamma_z / n0, gamma_z)
    s = linalg.inv_sqrt(state.rho_E)
    ref = state.rho_E / state.d_X
    gamma = sum(_tr_sandwich(b, s, b) for b in state.blocks)
    lhs = sum(_tr_sandwich(b - ref, s, b - ref) for b in state.blocks)
    return CollisionReport(gamma, lhs, gamma - 1 / state.d_X)


@dataclass
class SandwichReport:
    eps: float
    middle: float
    lower: float
    upper: float

    @property
    def lower_slack(self) -> float:
        return self.middle - self.lower

    @property
    def upper_slack(self) -> float:
        return self.upper - self.middle

    @property
    def holds(self) -> bool:
        return min(self.lower_slack, self.upper_slack) >= -LEMMA_SLACK


def check_collision_sandwich(state, variant: str = "uniform") -> SandwichReport:
    """Trace distance sandwiches the excess collision probability.

    uniform:    ``4 eps^2/d_X <= Gamma_c - 1/d_X <= 2 eps (1 - 1/d_X)``
    nonuniform: ``4 eps^2/(d_X d_Z) <= Gamma_c(XZE) - Gamma_c(ZE)/d_X <= 2 eps (1 - 1/d_X)``
    """
    if variant == "uniform":
        if isinstance(state, CcqState):
            state = state.joint()
        eps = distance_from_uniform(state)
        col = collision_prob(state)
        d_x = state.d_X
        return SandwichReport(eps, col.gamma - 1 / d_x, 4 * eps**2 / d_x, 2 * eps * (1 - 1 / d_x))
    if variant == "nonuniform":
        if not isinstance(state, CcqState):
            raise DomainError("the non-uniform sandwich needs a ccq state")
        d_x, d_z = state.blocks.shape[:2]
        eps = conditional_distance_from_uniform(state)
        col = collision_prob(state)
        return SandwichReport(eps, col.identity_rhs, 4 * eps**2 / (d_x * d_z), 2 * eps * (1 - 1 / d_x))
    raise DomainError(f"unknown variant {variant!r}")


# -- min-entropy -------------------------------------------------------------

@dataclass
class GuessBounds:
    lower: float
    upper: float

    @property
    def h_min_bounds(self) -> tuple[float, float]:
        return -math.log2(self.upper), -math.log2(self.lower)


def min_entropy(state: CqState, mode: str = "classical_exact"):
    """Conditional min-entropy.

    ``classical_exact`` returns ``-log2 sum_e max_x p(x, e)`` for diagonal
    blocks.  ``quantum_bounds`` returns bounds on the guessing probability:
    the pretty-good measurement from below and the feasible choice
    ``sigma_E = rho_E`` from above.
    """
    if mode == "classical_exact":
        if not state.is_diagonal:
            raise DomainError("classical_exact needs diagonal blocks")
        diag = np.real(np.diagonal(state.blocks, axis1=1, axis2=2))
        return -math.log2(float(diag.max(axis=0).sum()))
    if mode == "quantum_bounds":
        s = linalg.inv_sqrt(state.rho_E)
        lower = sum(_tr_sandwich(b, s, b) for b in state.blocks)
        upper = max(linalg.operator_norm(s @ b @ s) for b in state.blocks)
        return GuessBounds(lower, upper)
    raise DomainError(f"unknown mode {mode!r}")


# -- XOR lemmas --------------------------------------------------------------

def _require_field(state, variant):
    if state.p is None or state.t is None:
        raise DomainError("state labels must be F_p^t vectors (use over_field)")
    if variant == "uniform" and not isinstance(state, CqState):
        raise DomainError("uniform variant takes a cq state over F_p^t")
    if variant == "nonuniform" and not isinstance(state, CcqState):
        raise DomainError("nonuniform variant takes a ccq state over F_p x F_p^t")


def xor_premise_distance(state, a: Sequence[int], variant: str = "uniform") -> float:
    """Distance from uniform of ``Z = <a, X>`` (or ``X0 + <a, X>``) given ``E``."""
    _require_field(state, variant)
    p, t = state.p, state.t
    a = tuple(a)
    if len(a) != t or any(not 0 <= c < p for c in a):
        raise DomainError(f"a must be a vector in F_{p}^{t}")
    z_blocks = np.zeros((p, state.d_E, state.d_E), dtype=complex)
    if variant == "uniform":
        for x, blk in zip(state.labels, state.blocks):
            z_blocks[inner_product(p, a, x)] += blk
    else:
        for i, x0 in enumerate(state.labels0):
            for j, x in enumerate(state.labels1):
                z_blocks[(x0 + inner_product(p, a, x)) % p] += state.blocks[i, j]
    ref = state.rho_E / p
    return sum(_half_trace_norm(b - ref) for b in z_blocks)


@dataclass
class XorReport:
    variant: str
    lhs: float
    rhs: float
    eps: float
    eps_by_a: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin >= -LEMMA_SLACK


MAX_XOR_LABELS = 1 << 10
MAX_XOR_DIM = 8


def check_xor_lemma(state, variant: str = "uniform") -> XorReport:
    """Compare the distance of the whole register to the XOR-lemma bound.

    uniform:    ``lhs = d(rho_XE, U_X rho_E)``, ``rhs = p^{t/2} sqrt(eps/2)``, eps over a != 0
    nonuniform: ``lhs = d(rho_{X0XE}, U_{X0} rho_XE)``, ``rhs = p^{(t+1)/2} sqrt(eps/2)``, eps over all a
    """
    _require_field(state, variant)
    p, t = state.p, state.t
    if p**t > MAX_XOR_LABELS or state.d_E > MAX_XOR_DIM:
        raise ResourceError(f"p^t = {p**t}, d_E = {state.d_E} too large for the XOR check")
    eps_by_a = {}
    for a in fp_vectors(p, t):
        if variant == "uniform" and not any(a):
            continue
        eps_by_a[a] = xor_premise_distance(state, a, variant)
    eps = max(eps_by_a.values(), default=0.0)
    if variant == "uniform":
        lhs = distance_from_uniform(state)
        rhs = p ** (t / 2) * math.sqrt(eps / 2)
    else:
        lhs = conditional_distance_from_uniform(state)
        rhs = p ** ((t + 1) / 2) * math.sqrt(eps / 2)
    return XorReport(variant, lhs, rhs, eps, eps_by_a)


# -- guessing measurement ----------------------------------------------------

@dataclass
class GuessMeasurement:
    operators: np.ndarray
    success: float
    eps: float

    @property
    def predicted(self) -> float:
        d = len(self.operators)
        return 1 / d + self.eps / d


MAX_GUESS_DIM = 64


def guess_measurement_from_distance(state: CqState) -> GuessMeasurement:
    """POVM guessing ``X`` with success ``(1 + eps)/d_X`` where eps is the distance to uniform.

    ``M'_x`` projects onto the positive part of ``rho^x - rho_E/d_X`` and
    ``M_x = (M'_x + I - M'/d_X)/d_X`` with ``M' = sum_x M'_x``.
    """
    d_x, d_e = state.d_X, state.d_E
    if d_x * d_e > MAX_GUESS_DIM:
        raise ResourceError(f"d_X * d_E = {d_x * d_e} exceeds {MAX_GUESS_DIM}")
    ref = state.rho_E / d_x
    proj = np.array([linalg.positive_projector(b - ref) for b in state.blocks])
    total = proj.sum(axis=0)
    ident = np.eye(d_e)
    ops = (proj + (ident - total / d_x)) / d_x
    success = float(sum(np.real(np.trace(m @ b)) for m, b in zip(ops, state.blocks)))
    return GuessMeasurement(ops, success, distance_from_uniform(state))


def is_povm(ops: np.ndarray, tol: float = 1e-9) -> bool:
    d = ops.shape[-1]
    if np.abs(ops.sum(axis=0) - np.eye(d)).max() > tol:
        return False
    return all(linalg.min_eigenvalue(m) >= -tol for m in ops)
