"""Dense Hermitian linear algebra for small density operators.

Eigendecompositions use cyclic Jacobi rotations, which is accurate and simple
at the dimensions used here (at most 64).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NumericalError

MAX_DIM = 64
MAX_SWEEPS = 100
OFF_TOL = 1e-12
HERMITIAN_TOL = 1e-12
KERNEL_TOL = 1e-12


def hermitian(a) -> np.ndarray:
    """Return ``a`` as a complex Hermitian matrix, symmetrizing rounding noise."""
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale * 1e3:
        raise DomainError("matrix is not Hermitian")
    return (a + a.conj().T) / 2


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigh(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of ``h``."""
    a = hermitian(h)
    d = a.shape[0]
    if d > MAX_DIM:
        raise DomainError(f"dimension {d} exceeds {MAX_DIM}")
    v = np.eye(d, dtype=complex)
    tol = OFF_TOL * max(1.0, float(np.linalg.norm(a)))
    for _ in range(MAX_SWEEPS):
        if _off_norm(a) < tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e100:
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # columns p, q of the unitary: [c, s*phase] / [-s*conj(phase), c]
                # rotated so that the (p, q) entry vanishes
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * np.conj(phase) * cq
                a[:, q] = s * phase * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * np.conj(phase) * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * phase * vp + c * vq
    else:
        if _off_norm(a) >= tol:
            raise NumericalError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def apply_spectral(h, fn) -> np.ndarray:
    w, v = eigh(h)
    return (v * fn(w)) @ v.conj().T


def trace_norm(h) -> float:
    w, _ = eigh(h)
    return float(np.sum(np.abs(w)))


def operator_norm(h) -> float:
    w, _ = eigh(h)
    return float(np.max(np.abs(w), initial=0.0))


def positive_projector(h) -> np.ndarray:
    """Projector onto the span of eigenvectors with positive eigenvalue."""
    w, v = eigh(h)
    keep = v[:, w > KERNEL_TOL]
    return keep @ keep.conj().T


def inv_sqrt(h) -> np.ndarray:
    """Generalized inverse square root of a PSD matrix, zero on its kernel."""
    def f(w):
        out = np.zeros_like(w)
        pos = w > KERNEL_TOL
        out[pos] = 1.0 / np.sqrt(w[pos])
        return out
    return apply_spectral(h, f)


def min_eigenvalue(h) -> float:
    w, _ = eigh(h)
    return float(w[-1])
