"""Dense complex linear algebra for small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here
is a pure function; inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .constants import SPECTRAL_TOL, STRUCTURAL_TOL

_MAX_SWEEPS = 100


class DimensionError(ValueError):
    """Raised when operand dimensions are inconsistent."""


class NotHermitianError(ValueError):
    """Raised when a Hermitian matrix was required."""


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def tensor(*ops) -> np.ndarray:
    """Kronecker product of the operands, left factor is the slow index.

    Evaluated as a left fold, so ``tensor(a, b, c) == kron(kron(a, b), c)``.
    """
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=np.complex128) for o in ops))


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced matrix on the subsystem(s) ``keep``.

    Args:
        m: square matrix on the composite space.
        dims: subsystem dimensions, in tensor-product order.
        keep: index (or sequence of indices) of the subsystems to keep.

    Returns:
        The matrix obtained by tracing out every other subsystem.
    """
    a = as_matrix(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise DimensionError(f"matrix shape {a.shape} does not match dims {dims}")
    keep = [keep] if np.isscalar(keep) else list(keep)
    n = len(dims)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"invalid subsystem selection {keep} for {n} subsystems")
    keep = sorted(keep)
    t = a.reshape(dims + dims)
    # Trace pairs from the highest index down so remaining axis positions stay valid.
    for k in sorted(set(range(n)) - set(keep), reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def hermiticity_residual(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def is_hermitian(m, tol: float = STRUCTURAL_TOL) -> bool:
    return hermiticity_residual(m) <= tol


def is_unitary(u, tol: float = STRUCTURAL_TOL) -> bool:
    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        return False
    return frobenius(dagger(a) @ a - np.eye(a.shape[0])) <= tol


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # G acts on the (p, q) plane; A <- G^H A G zeroes A[p, q].
    g_pp, g_pq = c, s
    g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)
    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = col_p * g_pp + col_q * g_qp
    a[:, q] = col_p * g_pq + col_q * g_qq
    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
    a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    vp, vq = v[:, p].copy(), v[:, q].copy()
    v[:, p] = vp * g_pp + vq * g_qp
    v[:, q] = vp * g_pq + vq * g_qq


def eig_hermitian(m, tol: float = STRUCTURAL_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    A 2x2 input is diagonalized by a single rotation, which is the closed-form
    solution. Eigenvalues come back sorted descending; ties keep the order in
    which the sweeps produced them.

    Raises:
        NotHermitianError: if ``m`` deviates from Hermitian by more than ``tol``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"eig_hermitian needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian (residual {hermiticity_residual(a):.3e})"
        )
    d = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(d, dtype=np.complex128)
    scale = max(frobenius(a), np.finfo(float).tiny)
    for _ in range(_MAX_SWEEPS):
        off = frobenius(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                _jacobi_rotate(a, v, p, q)
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return EigenSystem(eigenvalues=w[order], eigenvectors=v[:, order])


def eigen_residuals(m, es: EigenSystem) -> tuple[float, float]:
    """Reconstruction residual and orthonormality defect of an eigen-system."""
    rec = frobenius(as_matrix(m) - es.reconstruct())
    v = es.eigenvectors
    orth = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))
    return rec, orth


def check_density(rho, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Validate Hermiticity and unit trace; return the matrix as complex array."""
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"density matrix must be square, got {a.shape}")
    if not is_hermitian(a, tol):
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(a).real
    if abs(tr - 1.0) > max(tol, SPECTRAL_TOL * 0.01):
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    return a
