"""Quantum N-SWITCH over Kraus channels with cyclic orders.

The control register has dimension N. Control state |j> selects the j-th
cyclic shift of the channel order, so for a multi-index (i_1, ..., i_N)

    S = sum_j  (E^(j+1) E^(j+2) ... E^(N) E^(1) ... E^(j))  x  |j><j|

where each E^(k) carries its own index i_k and the right-most factor acts
first. For N = 2 this is E_i E_j x |0><0| + E_j E_i x |1><1|.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .constants import STRUCTURAL_TOL
from .qmat import DimensionError, as_matrix, dagger, frobenius, projector
from .thermo import KrausChannel

# Multi-indices handled per vectorized block when streaming Kraus operators.
_CHUNK = 256


@dataclass(frozen=True)
class SwitchedChannel:
    """Output of the N-SWITCH superchannel, acting on target (x) control."""

    channels: tuple
    target_dim: int

    @property
    def n(self) -> int:
        return len(self.channels)

    @property
    def control_dim(self) -> int:
        return self.n

    @property
    def joint_dim(self) -> int:
        return self.target_dim * self.n

    @property
    def num_kraus(self) -> int:
        return int(np.prod([len(c.kraus_ops) for c in self.channels]))

    def orders(self) -> list[tuple[int, ...]]:
        """Channel order for each control basis state, left-most factor first."""
        base = tuple(range(self.n))
        return [base[j:] + base[:j] for j in range(self.n)]

    def iter_kraus_blocks(self, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
        """Yield stacks of joint Kraus operators, multi-indices in lexicographic order."""
        stacks = [c.stacked for c in self.channels]
        ranges = [range(len(c.kraus_ops)) for c in self.channels]
        orders = self.orders()
        d, n = self.target_dim, self.n
        it = itertools.product(*ranges)
        while True:
            idx = np.array(list(itertools.islice(it, chunk)), dtype=int)
            if idx.size == 0:
                return
            idx = idx.reshape(-1, n)
            out = np.zeros((idx.shape[0], d * n, d * n), dtype=np.complex128)
            for j, order in enumerate(orders):
                prod = stacks[order[0]][idx[:, order[0]]]
                for k in order[1:]:
                    prod = prod @ stacks[k][idx[:, k]]
                # Row/column index of target x control is t * n + c.
                out[:, j::n, j::n] = prod
            yield out

    def iter_kraus(self) -> Iterator[np.ndarray]:
        for block in self.iter_kraus_blocks():
            yield from block

    @property
    def kraus_ops(self) -> list[np.ndarray]:
        return list(self.iter_kraus())

    def completeness_residual(self) -> float:
        acc = np.zeros((self.joint_dim, self.joint_dim), dtype=np.complex128)
        for block in self.iter_kraus_blocks():
            acc += np.einsum("kji,kjl->il", block.conj(), block)
        return frobenius(acc - np.eye(self.joint_dim))

    def as_channel(self) -> KrausChannel:
        return KrausChannel(tuple(self.iter_kraus()))


def build_n_switch(channels: Sequence[KrausChannel]) -> SwitchedChannel:
    """Put ``channels`` in a coherent superposition of their N cyclic orders.

    Raises:
        ValueError: for fewer than two channels.
        DimensionError: if the channels are not all square on one dimension.
    """
    channels = tuple(channels)
    if len(channels) < 2:
        raise ValueError("the N-SWITCH needs at least two channels")
    d = channels[0].input_dim
    for c in channels:
        if c.input_dim != d or c.output_dim != d:
            raise DimensionError("all switched channels must map C^d to C^d with one d")
    return SwitchedChannel(channels=channels, target_dim=d)


def apply_switch(sc: SwitchedChannel, joint) -> np.ndarray:
    """sum_S S rho S^dagger for a joint target-control state.

    ``joint`` may carry leading batch axes; the sum is accumulated one block of
    Kraus operators at a time in a fixed order, so the result is bit-stable.
    """
    rho = np.asarray(joint, dtype=np.complex128)
    D = sc.joint_dim
    if rho.shape[-2:] != (D, D):
        raise DimensionError(f"joint state must be {D}x{D}, got {rho.shape[-2:]}")
    out = np.zeros_like(rho)
    for block in sc.iter_kraus_blocks():
        if rho.ndim == 2:
            out += np.einsum("kij,jl,kml->im", block, rho, block.conj(), optimize=True)
        else:
            for s in block:
                out += s @ rho @ s.conj().T
    return out


def gamma_plus(n: int) -> np.ndarray:
    """Uniform superposition (1/sqrt(n)) sum_i |i>."""
    return np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128)


def pm_basis() -> list[np.ndarray]:
    s = 1.0 / np.sqrt(2.0)
    return [np.array([s, s], dtype=np.complex128), np.array([s, -s], dtype=np.complex128)]


def yes_no_projectors(n: int) -> list[np.ndarray]:
    """{|g+><g+|, 1 - |g+><g+|} on an n-dimensional control."""
    p = projector(gamma_plus(n))
    return [p, np.eye(n, dtype=np.complex128) - p]


def bloch_basis(theta: float, phi: float) -> list[np.ndarray]:
    """Orthonormal qubit basis {|v>, |v_perp>} with |v> at Bloch angles (theta, phi)."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    e = np.exp(1j * phi)
    return [np.array([c, e * s], dtype=np.complex128), np.array([s, -e * c], dtype=np.complex128)]


def basis_projectors(vectors) -> list[np.ndarray]:
    return [projector(v) for v in vectors]


def check_projectors(projectors, control_dim: int, tol: float = STRUCTURAL_TOL) -> list[np.ndarray]:
    """Validate a complete set of mutually orthogonal projectors."""
    ps = [as_matrix(p) for p in projectors]
    if not ps:
        raise ValueError("empty projector set")
    for p in ps:
        if p.shape != (control_dim, control_dim):
            raise DimensionError("projector dimension does not match the control")
        if frobenius(p @ p - p) > tol or frobenius(p - dagger(p)) > tol:
            raise ValueError("measurement operator is not an orthogonal projector")
    if frobenius(sum(ps) - np.eye(control_dim)) > tol:
        raise ValueError("projectors do not sum to the identity")
    for a, b in itertools.combinations(ps, 2):
        if frobenius(a @ b) > tol:
            raise ValueError("projectors are not mutually orthogonal")
    return ps


def measure_control(joint, target_dim: int, control_dim: int, projectors) -> list[tuple[float, np.ndarray]]:
    """Projective measurement of the control.

    Returns:
        For each projector P_a, the pair (p_a, Tr_C[(1 x P_a) rho (1 x P_a)]) with
        the target state left un-normalized (its trace is p_a).
    """
    rho = as_matrix(joint)
    D = target_dim * control_dim
    if rho.shape != (D, D):
        raise DimensionError(f"joint state must be {D}x{D}, got {rho.shape}")
    ps = check_projectors(projectors, control_dim)
    t = rho.reshape(target_dim, control_dim, target_dim, control_dim)
    out = []
    for p in ps:
        # Tr_C[(1 x P) rho (1 x P)] = sum_{c,c'} P[c', c] rho[t c, t' c'] by cyclicity.
        branch = np.einsum("icjd,dc->ij", t, p)
        out.append((float(np.trace(branch).real), branch))
    return out
