"""Ergotropy and its variants.

``ergotropy`` is the maximal work extractable by a cyclic unitary,
Tr[rho H] - Tr[rho_passive H], where the passive state pairs the eigenvalues
of rho (descending) with the energies (ascending). For qubits the total splits
into an incoherent part (population inversion) and a coherent part.

``daemonic_ergotropy`` averages the ergotropy of the target over the outcomes
of a projective measurement on a control system, maximized over the
measurement unless one is supplied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .constants import OPTIMIZATION_TOL, PSD_TOL, SPECTRAL_TOL, STRUCTURAL_TOL
from .qmat import (
    DimensionError,
    as_matrix,
    check_density,
    eig_hermitian,
    partial_trace,
)
from .switch import (
    basis_projectors,
    bloch_basis,
    check_projectors,
    measure_control,
    yes_no_projectors,
)
from .thermo import Hamiltonian

BLOCH_GRID = 64
FULL_SEARCH_RESTARTS = 512
_REFINE_SEEDS = 3


class NotPositiveError(ValueError):
    """Raised when a state has an eigenvalue below -PSD_TOL."""


@dataclass(frozen=True)
class ErgotropyReport:
    """Work content of a state.

    ``permutation[i]`` is the energy level whose population is moved to level
    ``i`` by the optimal permutation (incoherent part); ``unitary`` maps the
    state to ``passive_state``.
    """

    total: float
    incoherent: float
    coherent: float
    passive_state: np.ndarray = field(repr=False)
    unitary: np.ndarray = field(repr=False)
    permutation: tuple


@dataclass(frozen=True)
class Branch:
    probability: float
    state: np.ndarray | None = field(repr=False)
    report: ErgotropyReport | None


@dataclass(frozen=True)
class DaemonicReport:
    value: float
    incoherent: float
    coherent: float
    projectors: list = field(repr=False)
    angles: tuple | None
    branches: list = field(repr=False)


def _energy_frame(rho: np.ndarray, h: Hamiltonian) -> np.ndarray:
    b = h.basis
    return b.conj().T @ rho @ b


def _clipped_spectrum(rho: np.ndarray):
    es = eig_hermitian(rho)
    w = es.eigenvalues
    if w[-1] < -PSD_TOL:
        raise NotPositiveError(f"state has eigenvalue {w[-1]:.3e} < -{PSD_TOL:g}")
    w = np.clip(w, 0.0, None)
    s = w.sum()
    if s > 0:
        w = w / s
    return w, es.eigenvectors


def ergotropy(rho, h: Hamiltonian | None = None) -> ErgotropyReport:
    """Ergotropy of a normalized state under Hamiltonian ``h`` (qubit gap 1 by default).

    Raises:
        DimensionError: if ``rho`` and ``h`` disagree in dimension.
        NotPositiveError: if ``rho`` has an eigenvalue below ``-PSD_TOL``.
    """
    h = Hamiltonian.qubit() if h is None else h
    r = check_density(rho)
    if r.shape[0] != h.dim:
        raise DimensionError("state and Hamiltonian dimensions differ")
    eps = h.energies
    w, vecs = _clipped_spectrum(r)
    energy = float(np.real(np.trace(r @ h.matrix)))
    total = max(energy - float(w @ eps), 0.0)
    passive = (h.basis * w) @ h.basis.conj().T
    unitary = h.basis @ vecs.conj().T

    pops = np.real(np.diag(_energy_frame(r, h)))
    perm = tuple(int(i) for i in np.argsort(-pops, kind="stable"))
    incoherent = max(energy - float(pops[list(perm)] @ eps), 0.0)
    incoherent = min(incoherent, total)
    return ErgotropyReport(
        total=total,
        incoherent=incoherent,
        coherent=total - incoherent,
        passive_state=passive,
        unitary=unitary,
        permutation=perm,
    )


def _qubit_frame(rho, h: Hamiltonian | None):
    h = Hamiltonian.qubit() if h is None else h
    r = as_matrix(rho)
    if r.shape != (2, 2) or h.dim != 2:
        raise DimensionError("qubit formula needs a 2x2 state and a two-level Hamiltonian")
    return _energy_frame(r, h), h.energies[1] - h.energies[0]


def incoherent_ergotropy(rho, h: Hamiltonian | None = None) -> float:
    """max{0, rho_11 - rho_00} * gap, populations taken in the energy basis."""
    r, gap = _qubit_frame(rho, h)
    return max(0.0, float(r[1, 1].real - r[0, 0].real)) * gap


def coherent_ergotropy(rho, h: Hamiltonian | None = None) -> float:
    """(eta - sqrt(eta^2 - 4|rho_01|^2)) / 2 * gap with eta = sqrt(2 Tr rho^2 - 1)."""
    r, gap = _qubit_frame(rho, h)
    purity = float(np.real(np.trace(r @ r)))
    eta = np.sqrt(max(2.0 * purity - 1.0, 0.0))
    c2 = abs(r[0, 1]) ** 2
    radicand = eta * eta - 4.0 * c2
    if radicand < -STRUCTURAL_TOL:
        raise ValueError(f"coherence exceeds the purity bound (radicand {radicand:.3e})")
    return 0.5 * (eta - np.sqrt(max(radicand, 0.0))) * gap


def local_ergotropy(joint, dims: Sequence[int], hams: Sequence[Hamiltonian]) -> float:
    """Work extractable with product unitaries under a sum of local Hamiltonians."""
    dims = list(dims)
    if len(dims) != len(hams) or any(d != h.dim for d, h in zip(dims, hams)):
        raise DimensionError("dims and Hamiltonians do not match")
    r = check_density(joint)
    return sum(ergotropy(partial_trace(r, dims, k), h).total for k, h in enumerate(hams))


def global_ergotropy(joint, joint_h: Hamiltonian) -> float:
    return ergotropy(joint, joint_h).total


def batch_ergotropy(states: np.ndarray, h: Hamiltonian) -> np.ndarray:
    """Vectorized ergotropy of a stack of (possibly un-normalized) PSD matrices.

    Ergotropy is homogeneous of degree one, so un-normalized branch states
    give p_a * W(rho_a) directly.
    """
    s = np.asarray(states, dtype=np.complex128)
    energy = np.real(np.einsum("...ij,ji->...", s, h.matrix))
    lam = np.linalg.eigvalsh(s)[..., ::-1]
    return np.maximum(energy - lam @ h.energies, 0.0)


def branch_states(joint: np.ndarray, target_dim: int, control_dim: int, vectors: np.ndarray) -> np.ndarray:
    """Un-normalized target states Tr_C[(1 x |v><v|) rho] for a stack of control vectors."""
    t = np.asarray(joint).reshape(target_dim, control_dim, target_dim, control_dim)
    v = np.asarray(vectors, dtype=np.complex128)
    return np.einsum("...c,icjd,...d->...ij", v.conj(), t, v)


class _BlochBranches:
    """Branch ergotropies of a qubit-control measurement as a function of Bloch angles.

    With |v> = (cos(t/2), e^{ip} sin(t/2)) the branch for |v> is
    mean + cos(t) * half_diff + sin(t) * Re(e^{ip} off) (and the minus sign for
    |v_perp>), with blocks expressed in the energy frame of the target.
    """

    def __init__(self, joint, target_dim: int, h: Hamiltonian):
        t = np.asarray(joint).reshape(target_dim, 2, target_dim, 2)
        b = h.basis
        blocks = [[b.conj().T @ t[:, c, :, d] @ b for d in range(2)] for c in range(2)]
        self.mean = 0.5 * (blocks[0][0] + blocks[1][1])
        self.half_diff = 0.5 * (blocks[0][0] - blocks[1][1])
        self.b01 = 0.5 * blocks[0][1]
        self.b10 = 0.5 * blocks[1][0]
        self.h = h
        self.qubit = target_dim == 2
        self.gap = float(h.energies[-1] - h.energies[0])

    def _pair(self, theta, phi):
        theta = np.asarray(theta, dtype=float)[..., None, None]
        e = np.exp(1j * np.asarray(phi, dtype=float))[..., None, None]
        shift = np.cos(theta) * self.half_diff + np.sin(theta) * (e * self.b01 + e.conj() * self.b10)
        return self.mean + shift, self.mean - shift

    def _work(self, s):
        if self.qubit:
            a, d = s[..., 0, 0].real, s[..., 1, 1].real
            half = 0.5 * (a - d)
            return self.gap * np.maximum(np.sqrt(half * half + np.abs(s[..., 0, 1]) ** 2) - half, 0.0)
        eps = self.h.energies
        energy = np.real(np.einsum("...ii->...i", s)) @ eps
        lam = np.linalg.eigvalsh(s)[..., ::-1]
        return np.maximum(energy - lam @ eps, 0.0)

    def __call__(self, theta, phi):
        v, w = self._pair(theta, phi)
        return self._work(v) + self._work(w)

    def scalar(self, theta: float, phi: float) -> float:
        if not self.qubit:
            return float(self(theta, phi))
        # Same arithmetic as _work on plain Python scalars, for the refinement loop.
        ct, st = math.cos(theta), math.sin(theta)
        e = complex(math.cos(phi), math.sin(phi))
        m, hd, b01, b10 = self.mean, self.half_diff, self.b01, self.b10
        total = 0.0
        for sign in (1.0, -1.0):
            a = (m[0, 0] + sign * (ct * hd[0, 0] + st * (e * b01[0, 0] + e.conjugate() * b10[0, 0]))).real
            d = (m[1, 1] + sign * (ct * hd[1, 1] + st * (e * b01[1, 1] + e.conjugate() * b10[1, 1]))).real
            off = m[0, 1] + sign * (ct * hd[0, 1] + st * (e * b01[0, 1] + e.conjugate() * b10[0, 1]))
            half = 0.5 * (a - d)
            total += max(math.sqrt(half * half + abs(off) ** 2) - half, 0.0)
        return self.gap * total


def optimize_bloch_measurement(joint, target_dim: int, h: Hamiltonian, grid: int = BLOCH_GRID):
    """Best rank-1 projective qubit measurement as Bloch angles (theta, phi).

    A ``grid x grid`` scan of theta in [0, pi), phi in [0, 2 pi) seeds Nelder-Mead
    refinements from the best few grid points. Ties go to the smallest
    (theta, phi).
    """
    objective = _BlochBranches(joint, target_dim, h)
    thetas = np.pi * np.arange(grid) / grid
    phis = 2.0 * np.pi * np.arange(grid) / grid
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    vals = objective(tt, pp)
    order = np.argsort(-vals, kind="stable")
    best_val = float(vals[order[0]])
    best = (float(tt[order[0]]), float(pp[order[0]]))

    def neg(x):
        return -objective.scalar(float(x[0]), float(x[1]))

    step = np.pi / grid
    for idx in order[:_REFINE_SEEDS]:
        x0 = np.array([tt[idx], pp[idx]])
        simplex = x0 + np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
        res = minimize(
            neg,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 2000, "initial_simplex": simplex},
        )
        if -res.fun > best_val + 1e-15:
            best_val = -float(res.fun)
            best = (float(res.x[0]), float(res.x[1]))
    return best, best_val


def _random_bases(dim: int, count: int, seed: int):
    from scipy.stats import unitary_group

    rng = np.random.default_rng(seed)
    for _ in range(count):
        u = unitary_group.rvs(dim, random_state=rng)
        yield [u[:, k] for k in range(dim)]


def evaluate_measurement(joint, target_dim: int, control_dim: int, h: Hamiltonian, projectors) -> DaemonicReport:
    """Average branch ergotropy for a fixed projective measurement on the control."""
    branches = []
    value = inc = coh = 0.0
    for p, unnorm in measure_control(joint, target_dim, control_dim, projectors):
        if p <= STRUCTURAL_TOL:
            branches.append(Branch(p, None, None))
            continue
        state = unnorm / p
        rep = ergotropy(state, h)
        branches.append(Branch(p, state, rep))
        value += p * rep.total
        inc += p * rep.incoherent
        coh += p * rep.coherent
    return DaemonicReport(
        value=value,
        incoherent=inc,
        coherent=coh,
        projectors=[as_matrix(p) for p in projectors],
        angles=None,
        branches=branches,
    )


def daemonic_ergotropy(
    joint,
    target_dim: int,
    control_dim: int,
    h_target: Hamiltonian | None = None,
    measurement=None,
    search: str = "auto",
    restarts: int = FULL_SEARCH_RESTARTS,
    seed: int = 0,
) -> DaemonicReport:
    """Daemonic ergotropy of the target given a measurement on the control.

    Args:
        joint: state on target (x) control.
        measurement: complete set of orthogonal projectors on the control. When
            omitted the measurement is optimized: over the Bloch sphere for a
            qubit control, otherwise the yes/no measurement onto the uniform
            superposition (``search="auto"``) or a random search over rank-1
            bases (``search="full"``).
    """
    h = Hamiltonian.qubit() if h_target is None else h_target
    if h.dim != target_dim:
        raise DimensionError("target Hamiltonian dimension mismatch")
    r = check_density(joint)
    if r.shape[0] != target_dim * control_dim:
        raise DimensionError("joint dimension is not target_dim * control_dim")
    if measurement is not None:
        return evaluate_measurement(r, target_dim, control_dim, h, check_projectors(measurement, control_dim))

    if control_dim == 2:
        (theta, phi), _ = optimize_bloch_measurement(r, target_dim, h)
        rep = evaluate_measurement(r, target_dim, 2, h, basis_projectors(bloch_basis(theta, phi)))
        return DaemonicReport(rep.value, rep.incoherent, rep.coherent, rep.projectors, (theta, phi), rep.branches)

    if search == "auto":
        return evaluate_measurement(r, target_dim, control_dim, h, yes_no_projectors(control_dim))
    if search != "full":
        raise ValueError(f"unknown search mode {search!r}")
    best = evaluate_measurement(r, target_dim, control_dim, h, yes_no_projectors(control_dim))
    candidates = [list(np.eye(control_dim, dtype=np.complex128))]
    candidates += list(_random_bases(control_dim, restarts, seed))
    for basis in candidates:
        vecs = np.stack(basis)
        val = float(batch_ergotropy(branch_states(r, target_dim, control_dim, vecs), h).sum())
        if val > best.value + OPTIMIZATION_TOL * 1e-3:
            best = evaluate_measurement(r, target_dim, control_dim, h, basis_projectors(basis))
    return best


def is_passive(rho, h: Hamiltonian | None = None, tol: float = SPECTRAL_TOL) -> bool:
    return ergotropy(rho, h).total <= tol
