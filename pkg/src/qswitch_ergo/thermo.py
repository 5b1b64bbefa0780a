"""Hamiltonians, Gibbs states and thermalizing (pin) channels.

Units: k_B = 1 and the qubit gap defaults to 1, so ``beta`` is measured in
inverse units of the gap. ``beta = math.inf`` is accepted everywhere and maps
to the zero-temperature limit without evaluating ``exp(-inf * 0)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import STRUCTURAL_TOL
from .qmat import (
    DimensionError,
    as_matrix,
    check_density,
    dagger,
    eig_hermitian,
    frobenius,
    is_unitary,
    partial_trace,
    tensor,
)


@dataclass(frozen=True)
class Hamiltonian:
    """Energy operator stored through its eigensystem.

    ``energies`` are ascending and ``basis[:, i]`` is the eigenvector of
    ``energies[i]``. The default basis is the computational one.
    """

    energies: np.ndarray
    basis: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).ravel()
        if e.size == 0:
            raise ValueError("Hamiltonian needs at least one level")
        if np.any(np.diff(e) < 0):
            raise ValueError("energies must be sorted ascending")
        b = np.eye(e.size, dtype=np.complex128) if self.basis is None else as_matrix(self.basis)
        if b.shape != (e.size, e.size):
            raise DimensionError("basis shape does not match the number of energies")
        if not is_unitary(b, 1e-10):
            raise ValueError("Hamiltonian basis must be orthonormal")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "basis", b)

    @classmethod
    def qubit(cls, gap: float = 1.0) -> "Hamiltonian":
        """H = gap |1><1|."""
        return cls(np.array([0.0, gap]))

    @classmethod
    def trivial(cls, dim: int) -> "Hamiltonian":
        """Fully degenerate Hamiltonian (zero energy everywhere)."""
        return cls(np.zeros(dim))

    @classmethod
    def from_matrix(cls, h) -> "Hamiltonian":
        es = eig_hermitian(h)
        return cls(es.eigenvalues[::-1].copy(), es.eigenvectors[:, ::-1].copy())

    @classmethod
    def non_interacting(cls, parts: Sequence["Hamiltonian"]) -> "Hamiltonian":
        """Sum of local terms H_1 + H_2 + ... on the tensor-product space."""
        energies = np.zeros(1)
        basis = np.ones((1, 1), dtype=np.complex128)
        for h in parts:
            energies = np.add.outer(energies, h.energies).ravel()
            basis = np.kron(basis, h.basis)
        order = np.argsort(energies, kind="stable")
        return cls(energies[order], basis[:, order])

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    @property
    def matrix(self) -> np.ndarray:
        return (self.basis * self.energies) @ self.basis.conj().T


@dataclass(frozen=True)
class ThermalState:
    beta: float
    hamiltonian: Hamiltonian
    matrix: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return boltzmann_weights(self.beta, self.hamiltonian)


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by Kraus operators E_k, rho -> sum_k E_k rho E_k^dagger."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionError("Kraus operators must share one shape")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def input_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_ops)

    def completeness_residual(self) -> float:
        k = self.stacked
        s = np.einsum("kji,kjl->il", k.conj(), k)
        return frobenius(s - np.eye(self.input_dim))

    def apply(self, rho) -> np.ndarray:
        r = np.asarray(rho, dtype=np.complex128)
        if r.shape[-1] != self.input_dim:
            raise DimensionError("state dimension does not match the channel input")
        k = self.stacked
        return np.einsum("kij,...jl,kml->...im", k, r, k.conj())

    def compose(self, first: "KrausChannel") -> "KrausChannel":
        """Channel ``self o first`` (``first`` acts first)."""
        return KrausChannel(tuple(a @ b for a in self.kraus_ops for b in first.kraus_ops))


def boltzmann_weights(beta: float, h: Hamiltonian) -> np.ndarray:
    """Normalized Gibbs populations in the energy eigenbasis."""
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"beta must be >= 0 or inf, got {beta!r}")
    shifted = h.energies - h.energies[0]
    if math.isinf(beta):
        w = (shifted == 0.0).astype(float)
    else:
        w = np.exp(-beta * shifted)
    return w / w.sum()


def partition_function(beta: float, h: Hamiltonian) -> float:
    """Z = sum_k exp(-beta e_k). Diverges/vanishes appropriately for beta = inf."""
    if math.isinf(beta):
        e0 = h.energies[0]
        if e0 > 0:
            return 0.0
        if e0 < 0:
            return math.inf
        return float(np.sum(h.energies == 0.0))
    return float(np.sum(np.exp(-beta * h.energies)))


def thermal_state(beta: float, h: Hamiltonian | None = None) -> ThermalState:
    """Gibbs state exp(-beta H)/Z; ``beta = inf`` gives the ground-space mixture."""
    h = Hamiltonian.qubit() if h is None else h
    w = boltzmann_weights(beta, h)
    m = (h.basis * w) @ h.basis.conj().T
    return ThermalState(beta=beta, hamiltonian=h, matrix=m)


def gibbs(beta: float, h: Hamiltonian | None = None) -> np.ndarray:
    """Matrix of ``thermal_state(beta, h)``."""
    return thermal_state(beta, h).matrix


def thermalizing_map(beta: float, h: Hamiltonian | None = None) -> KrausChannel:
    """Pin map onto the Gibbs state, as d^2 Kraus operators.

    E_k = sqrt(w_{k // d}) |e_{k // d}><e_{k mod d}| with normalized Boltzmann
    weights w, so the qubit case reads sqrt(p)|0><0|, sqrt(p)|0><1|,
    sqrt(1-p)|1><0|, sqrt(1-p)|1><1| with p = 1/(1 + exp(-beta)).
    """
    h = Hamiltonian.qubit() if h is None else h
    d = h.dim
    w = boltzmann_weights(beta, h)
    b = h.basis
    ops = []
    for k in range(d * d):
        out, inp = divmod(k, d)
        ops.append(np.sqrt(w[out]) * np.outer(b[:, out], b[:, inp].conj()))
    return KrausChannel(tuple(ops))


def swap_unitary(d1: int, d2: int | None = None) -> np.ndarray:
    """SWAP between two equal-dimensional factors, sum_ij |ij><ji|."""
    d2 = d1 if d2 is None else d2
    if d1 != d2:
        raise DimensionError("SWAP needs equal factor dimensions")
    u = np.zeros((d1 * d1, d1 * d1), dtype=np.complex128)
    for i in range(d1):
        for j in range(d1):
            u[i * d1 + j, j * d1 + i] = 1.0
    return u


def thermal_operation(rho, u_se, bath: ThermalState | np.ndarray) -> np.ndarray:
    """Tr_E[U (rho x tau) U^dagger] for a system-bath unitary ``u_se``.

    Raises:
        ValueError: if ``u_se`` is not unitary.
    """
    r = check_density(rho)
    tau = bath.matrix if isinstance(bath, ThermalState) else as_matrix(bath)
    if abs(np.trace(tau).real - 1.0) > STRUCTURAL_TOL:
        raise ValueError("bath state must have unit trace")
    u = as_matrix(u_se)
    ds, de = r.shape[0], tau.shape[0]
    if u.shape != (ds * de, ds * de):
        raise DimensionError("system-bath unitary has the wrong dimension")
    if not is_unitary(u):
        raise ValueError("u_se is not unitary")
    joint = u @ tensor(r, tau) @ dagger(u)
    return partial_trace(joint, [ds, de], keep=0)
