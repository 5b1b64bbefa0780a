"""Switched-thermalization experiments on a qubit target.

Each ``run_*`` function builds the joint target-control input, pushes it
through the N-SWITCH of thermalizing maps at inverse temperature ``beta``,
measures the control and reports the daemonic ergotropy together with the
matching analytic value from :mod:`closed_forms` when one exists.

Inputs are constructed here from :mod:`thermo`; :mod:`closed_forms` is only
consulted for the reference numbers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import closed_forms as cf
from .constants import OPTIMIZATION_TOL, STRUCTURAL_TOL
from .ergotropy import (
    DaemonicReport,
    ErgotropyReport,
    batch_ergotropy,
    branch_states,
    daemonic_ergotropy,
    ergotropy,
    evaluate_measurement,
)
from .qmat import projector, tensor
from .switch import (
    apply_switch,
    basis_projectors,
    build_n_switch,
    gamma_plus,
    pm_basis,
)
from .thermo import Hamiltonian, boltzmann_weights, gibbs, thermalizing_map

KINDS = ("product", "classical", "purified", "purified-opt", "definite")
THREADS_ENV = "QSWITCH_ERGO_THREADS"

ALPHA_STEPS = 256
PHI_STEPS = 128

QUBIT = Hamiltonian.qubit()


@dataclass(frozen=True)
class PurificationParams:
    alpha: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2 pi], got {self.phi}")


@dataclass
class ScenarioPoint:
    """One evaluated (beta_in, beta) point.

    ``w_d`` is the numerical daemonic ergotropy, ``w_di``/``w_dc`` its
    incoherent and coherent parts; ``w_d_closed``/``w_di_closed`` hold the
    analytic values where available.
    """

    kind: str
    beta_in: float
    beta: float
    n: int
    w_d: float
    w_di: float
    w_dc: float
    measurement: str
    daemonic: DaemonicReport = field(repr=False)
    w_d_closed: float | None = None
    w_di_closed: float | None = None
    alpha: float | None = None
    phi: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def residual(self) -> float | None:
        if self.w_d_closed is None:
            return None
        return abs(self.w_d - self.w_d_closed)

    def to_dict(self) -> dict:
        rep = self.daemonic
        branches = []
        for b in rep.branches:
            entry = {"probability": b.probability}
            if b.report is not None:
                entry.update(
                    ergotropy=b.report.total,
                    incoherent=b.report.incoherent,
                    coherent=b.report.coherent,
                    state_real=b.state.real.tolist(),
                    state_imag=b.state.imag.tolist(),
                )
            branches.append(entry)
        d = {
            "kind": self.kind,
            "beta_in": self.beta_in,
            "beta": self.beta,
            "n": self.n,
            "alpha": self.alpha,
            "phi": self.phi,
            "w_d": self.w_d,
            "w_d_closed": self.w_d_closed,
            "w_di": self.w_di,
            "w_dc": self.w_dc,
            "w_di_closed": self.w_di_closed,
            "measurement": self.measurement,
            "angles": None if rep.angles is None else {"theta": rep.angles[0], "phi_m": rep.angles[1]},
            "branches": branches,
        }
        d.update(self.extras)
        return d


# ---------------------------------------------------------------- inputs


def product_input(beta_in: float, n: int = 2) -> np.ndarray:
    """tau_{beta_in} (x) |g+><g+| with g+ the uniform superposition of n orders."""
    return tensor(gibbs(beta_in, QUBIT), projector(gamma_plus(n)))


def classical_corr_input(beta_in: float, psi=None) -> np.ndarray:
    """Locally thermal classical-classical state, control basis {psi, psi_perp}."""
    psi = pm_basis()[0] if psi is None else np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    w = boltzmann_weights(beta_in, QUBIT)
    return w[0] * tensor(np.diag([1.0, 0.0]), projector(psi)) + w[1] * tensor(np.diag([0.0, 1.0]), projector(perp))


def _purification_vectors(beta_in: float, alpha, phi) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    phi = np.asarray(phi, dtype=float)
    w = boltzmann_weights(beta_in, QUBIT)
    g, e = np.sqrt(w[0]), np.sqrt(w[1])
    sa, sb = np.sqrt(alpha), np.sqrt(1.0 - alpha)
    ph = np.exp(1j * phi)
    # |T> = sqrt(w0) |0>|psi> + sqrt(w1) |1>|psi_perp>, index = target * 2 + control.
    return np.stack(
        [g * sa + 0j, g * ph * sb, e * sb / ph, -e * sa + 0j],
        axis=-1,
    )


def purified_input(beta_in: float, params: PurificationParams) -> np.ndarray:
    """Pure target-control state whose target marginal is tau_{beta_in}."""
    return projector(_purification_vectors(beta_in, params.alpha, params.phi))


def definite_order_input(beta_in: float, n: int = 2) -> np.ndarray:
    return tensor(gibbs(beta_in, QUBIT), projector(np.eye(n)[0]))


def thermal_switch(beta: float, n: int = 2):
    return build_n_switch([thermalizing_map(beta, QUBIT)] * n)


# ---------------------------------------------------------------- runs


def _point(kind, beta_in, beta, n, rep: DaemonicReport, measurement, **kw) -> ScenarioPoint:
    return ScenarioPoint(
        kind=kind,
        beta_in=beta_in,
        beta=beta,
        n=n,
        w_d=rep.value,
        w_di=rep.incoherent,
        w_dc=rep.coherent,
        measurement=measurement,
        daemonic=rep,
        **kw,
    )


def definite_order_baseline(betas: Sequence[float], weights: Sequence[float]) -> ErgotropyReport:
    """Ergotropy of sum_k p_k tau_{beta_k}, the output of any causally ordered arrangement."""
    betas = list(betas)
    w = np.asarray(weights, dtype=float)
    if len(betas) == 0 or w.shape != (len(betas),):
        raise ValueError("need one weight per inverse temperature")
    if np.any(w < 0) or abs(w.sum() - 1.0) > STRUCTURAL_TOL:
        raise ValueError("weights must be non-negative and sum to one")
    rho = sum(wk * gibbs(b, QUBIT) for wk, b in zip(w, betas))
    return ergotropy(rho, QUBIT)


def run_product_switch(beta_in: float, beta: float, n: int = 2) -> ScenarioPoint:
    """tau_{beta_in} (x) |g+><g+| through the N-SWITCH.

    For n = 2 the control measurement is optimized over the Bloch sphere; for
    n > 2 the yes/no measurement onto |g+> is used.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    joint = apply_switch(thermal_switch(beta, n), product_input(beta_in, n))
    rep = daemonic_ergotropy(joint, 2, n, QUBIT)
    return _point(
        "product",
        beta_in,
        beta,
        n,
        rep,
        "bloch-optimized" if n == 2 else "yes-no",
        w_d_closed=cf.wd_product(beta_in, beta, n),
    )


def run_definite_order_switch(beta_in: float, beta: float, n: int = 2) -> ScenarioPoint:
    """Control prepared in |0>: a single definite order, output tau_beta (x) |0><0|."""
    joint = apply_switch(thermal_switch(beta, n), definite_order_input(beta_in, n))
    rep = daemonic_ergotropy(joint, 2, n, QUBIT)
    return _point("definite", beta_in, beta, n, rep, "bloch-optimized" if n == 2 else "yes-no", w_d_closed=0.0)


def run_classical_corr_switch(beta_in: float, beta: float, control_basis=None) -> ScenarioPoint:
    """Classically correlated, locally thermal input; measurement optimized.

    ``control_basis`` is the control state paired with the target ground
    state (default |+>). The analytic value applies when it is |+> or |->.
    """
    psi = pm_basis()[0] if control_basis is None else np.asarray(control_basis, dtype=complex)
    joint = apply_switch(thermal_switch(beta), classical_corr_input(beta_in, psi))
    rep = daemonic_ergotropy(joint, 2, 2, QUBIT)
    overlap = abs(np.vdot(pm_basis()[0], psi / np.linalg.norm(psi)))
    in_pm_basis = abs(overlap - 1.0) < 1e-12 or overlap < 1e-12
    closed = cf.wd_classical(beta_in, beta) if in_pm_basis else None
    return _point("classical", beta_in, beta, 2, rep, "bloch-optimized", w_d_closed=closed)


def _purified_closed(beta_in, beta, alpha, phi):
    if alpha in (0.0, 1.0):
        return cf.wd_coherent_purified(beta_in, beta)
    if alpha == 0.5 and abs(math.sin(phi)) < 1e-15:
        return cf.wd_incoherent_purified(alpha, phi, beta_in, beta)
    return None


def run_purified_switch(beta_in: float, beta: float, params: PurificationParams, optimize_measurement: bool = True) -> ScenarioPoint:
    """Purification |T_alpha(beta_in)> through the 2-SWITCH, control measured in {|+>, |->}.

    ``extras["w_d_measurement_optimized"]`` additionally reports the value
    with the control measurement optimized over the Bloch sphere.
    """
    joint = apply_switch(thermal_switch(beta), purified_input(beta_in, params))
    rep = evaluate_measurement(joint, 2, 2, QUBIT, basis_projectors(pm_basis()))
    extras = {}
    if optimize_measurement:
        extras["w_d_measurement_optimized"] = daemonic_ergotropy(joint, 2, 2, QUBIT).value
    return _point(
        "purified",
        beta_in,
        beta,
        2,
        rep,
        "pm",
        w_d_closed=_purified_closed(beta_in, beta, params.alpha, params.phi),
        w_di_closed=cf.wd_incoherent_purified(params.alpha, params.phi, beta_in, beta),
        alpha=params.alpha,
        phi=params.phi,
        extras=extras,
    )


def purified_values(beta_in: float, beta: float, alpha, phi) -> np.ndarray:
    """Vectorized {|+>, |->} daemonic ergotropy over arrays of (alpha, phi)."""
    vecs = _purification_vectors(beta_in, alpha, phi)
    joints = vecs[..., :, None] * vecs[..., None, :].conj()
    out = apply_switch(thermal_switch(beta), joints)
    pm = np.stack(pm_basis())
    shape = out.shape[:-2]
    flat = out.reshape(-1, 4, 4)
    total = np.zeros(flat.shape[0])
    for v in pm:
        br = np.einsum("c,bicjd,d->bij", v.conj(), flat.reshape(-1, 2, 2, 2, 2), v)
        total += batch_ergotropy(br, QUBIT)
    return total.reshape(shape)


def optimize_purification(
    beta_in: float,
    beta: float,
    alpha_steps: int = ALPHA_STEPS,
    phi_steps: int = PHI_STEPS,
) -> tuple[PurificationParams, ScenarioPoint]:
    """Maximize the {|+>, |->} daemonic ergotropy over purifications (alpha, phi).

    Grid over alpha in [0, 1] (``alpha_steps`` intervals) and phi in [0, 2 pi)
    followed by a bounded Nelder-Mead polish. Ties resolve to the smallest
    (alpha, phi). ``extras["phi_spread"]`` is the range of values over phi at
    the optimal alpha.
    """
    alphas = np.arange(alpha_steps + 1) / alpha_steps
    phis = 2.0 * np.pi * np.arange(phi_steps) / phi_steps
    aa, pp = np.meshgrid(alphas, phis, indexing="ij")
    vals = purified_values(beta_in, beta, aa, pp)
    flat = vals.ravel()
    top = flat.max()
    idx = int(np.flatnonzero(flat >= top - 1e-14)[0])
    ia, ip = divmod(idx, phi_steps)
    best_a, best_p, best_v = float(alphas[ia]), float(phis[ip]), float(flat[idx])

    def neg(x):
        a = min(max(x[0], 0.0), 1.0)
        p = x[1] % (2.0 * np.pi)
        return -float(purified_values(beta_in, beta, a, p))

    da = 0.5 / alpha_steps if best_a < 1.0 else -0.5 / alpha_steps
    simplex = [[best_a, best_p], [best_a + da, best_p], [best_a, best_p + np.pi / phi_steps]]
    res = minimize(
        neg,
        np.array([best_a, best_p]),
        method="Nelder-Mead",
        bounds=[(0.0, 1.0), (None, None)],
        options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 400, "initial_simplex": simplex},
    )
    if -res.fun > best_v + OPTIMIZATION_TOL * 1e-3:
        best_a = float(min(max(res.x[0], 0.0), 1.0))
        best_p = float(res.x[1] % (2.0 * np.pi))
    params = PurificationParams(best_a, best_p)
    point = run_purified_switch(beta_in, beta, params, optimize_measurement=False)
    row = purified_values(beta_in, beta, np.full(phi_steps, best_a), phis)
    point.kind = "purified-opt"
    point.w_d_closed = cf.wd_purified_optimal(beta_in, beta)
    point.extras["phi_spread"] = float(row.max() - row.min())
    return params, point


def run_unequal_switch(beta_in: float, beta1: float, beta2: float) -> ScenarioPoint:
    """Product input through the 2-SWITCH of maps at two different temperatures.

    ``w_d`` uses the {|+>, |->} measurement, for which work is extractable iff
    beta_in > beta1 + beta2. With beta1 != beta2 the two control-diagonal
    blocks differ and a tilted measurement can do better, even below that
    bound; ``extras["w_d_measurement_optimized"]`` reports it.
    """
    sc = build_n_switch([thermalizing_map(beta1, QUBIT), thermalizing_map(beta2, QUBIT)])
    joint = apply_switch(sc, product_input(beta_in, 2))
    rep = evaluate_measurement(joint, 2, 2, QUBIT, basis_projectors(pm_basis()))
    p = _point("product", beta_in, float("nan"), 2, rep, "pm")
    p.extras.update(
        beta1=beta1,
        beta2=beta2,
        w_d_measurement_optimized=daemonic_ergotropy(joint, 2, 2, QUBIT).value,
    )
    return p


# ---------------------------------------------------------------- sweeps


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Iterable, threads: int | None = None) -> list:
    """Ordered map, threaded when ``threads`` (or the env setting) exceeds one."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_point(kind: str, beta_in: float, beta: float, n: int = 2, alpha: float = 0.0, phi: float = 0.0) -> ScenarioPoint:
    if kind == "product":
        return run_product_switch(beta_in, beta, n)
    if kind == "classical":
        return run_classical_corr_switch(beta_in, beta)
    if kind == "purified":
        return run_purified_switch(beta_in, beta, PurificationParams(alpha, phi))
    if kind == "purified-opt":
        return optimize_purification(beta_in, beta)[1]
    if kind == "definite":
        return run_definite_order_switch(beta_in, beta, n)
    raise ValueError(f"unknown input kind {kind!r}; expected one of {KINDS}")


def sweep(kind: str, betas: Sequence[float], beta_ins: Sequence[float], n: int = 2, alpha: float = 0.0, phi: float = 0.0, threads: int | None = None) -> list[ScenarioPoint]:
    """Evaluate every (beta, beta_in) pair; beta is the outer loop."""
    if len(betas) == 0 or len(beta_ins) == 0:
        raise ValueError("sweep grids must be non-empty")
    pairs = [(b, bi) for b in betas for bi in beta_ins]
    return parallel_map(lambda bb: run_point(kind, bb[1], bb[0], n, alpha, phi), pairs, threads)


def closed_form(kind: str, beta_in: float, beta: float, n: int = 2) -> float:
    if kind == "product":
        return cf.wd_product(beta_in, beta, n)
    if kind == "classical":
        return cf.wd_classical(beta_in, beta)
    if kind in ("purified", "purified-opt"):
        return cf.wd_purified_optimal(beta_in, beta)
    if kind == "definite":
        return 0.0
    raise ValueError(f"unknown input kind {kind!r}")


@dataclass(frozen=True)
class RegionRow:
    beta: float
    beta_in: float
    positive: bool
    w_d: float
    checked: bool = False
    w_d_numeric: float | None = None

    @property
    def residual(self) -> float | None:
        return None if self.w_d_numeric is None else abs(self.w_d_numeric - self.w_d)


def region_map(
    beta_grid: Sequence[float],
    beta_in_grid: Sequence[float],
    kind: str,
    seed: int = 0,
    check_fraction: float = 0.05,
    threads: int | None = None,
) -> list[RegionRow]:
    """Where the (optimal) daemonic ergotropy is positive.

    Values come from the analytic expressions; a seeded random subsample of
    ``check_fraction`` of the points is recomputed through the Kraus pipeline
    (``purified`` means the purification-optimized value).
    """
    if len(beta_grid) == 0 or len(beta_in_grid) == 0:
        raise ValueError("region grids must be non-empty")
    kind = "purified-opt" if kind == "purified" else kind
    pairs = [(b, bi) for b in beta_grid for bi in beta_in_grid]
    rng = np.random.default_rng(seed)
    k = max(1, int(round(check_fraction * len(pairs)))) if check_fraction > 0 else 0
    check = set(rng.choice(len(pairs), size=min(k, len(pairs)), replace=False).tolist()) if k else set()

    def one(i):
        b, bi = pairs[i]
        w = closed_form(kind, bi, b)
        numeric = run_point(kind, bi, b).w_d if i in check else None
        return RegionRow(b, bi, w > 0.0, w, i in check, numeric)

    return parallel_map(one, range(len(pairs)), threads)


# ---------------------------------------------------------------- discord vs entanglement


def random_separable_input(beta_in: float, rng: np.random.Generator, terms: int | None = None) -> np.ndarray:
    """Random separable, locally thermal joint state with non-orthogonal control states.

    sum_k w_k sigma_k (x) |c_k><c_k| where the first terms take total weight
    below the smallest thermal population and the last target state is the
    (positive) remainder, so that sum_k w_k sigma_k = tau_{beta_in} exactly.
    """
    terms = int(rng.integers(2, 5)) if terms is None else terms
    tau = gibbs(beta_in, QUBIT)
    budget = float(np.min(boltzmann_weights(beta_in, QUBIT))) * rng.uniform(0.2, 0.999)
    weights = rng.dirichlet(np.ones(terms - 1)) * budget
    joint = np.zeros((4, 4), dtype=complex)
    remainder = tau.copy()
    for wk in weights:
        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        sigma = x @ x.conj().T
        sigma /= np.trace(sigma).real
        c = rng.normal(size=2) + 1j * rng.normal(size=2)
        joint += wk * tensor(sigma, projector(c / np.linalg.norm(c)))
        remainder -= wk * sigma
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    joint += tensor(remainder, projector(c / np.linalg.norm(c)))
    return joint


@dataclass
class DiscordComparison:
    beta_in: float
    beta: float
    samples: int
    seed: int
    separable_max: float
    separable_max_pm: float
    entangled_max: float
    entangled_params: PurificationParams

    def to_dict(self) -> dict:
        return {
            "beta_in": self.beta_in,
            "beta": self.beta,
            "samples": self.samples,
            "seed": self.seed,
            "separable_max": self.separable_max,
            "separable_max_pm": self.separable_max_pm,
            "entangled_max": self.entangled_max,
            "entangled_alpha": self.entangled_params.alpha,
            "entangled_phi": self.entangled_params.phi,
        }


def compare_discord_entanglement(beta_in: float, beta: float, samples: int, seed: int = 0) -> DiscordComparison:
    """Best sampled separable-discordant input vs. the optimal purification.

    Both numbers are reported; no ordering between them is enforced.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    sc = thermal_switch(beta)
    pm = basis_projectors(pm_basis())
    best = best_pm = 0.0
    for _ in range(samples):
        joint = apply_switch(sc, random_separable_input(beta_in, rng))
        best = max(best, daemonic_ergotropy(joint, 2, 2, QUBIT).value)
        best_pm = max(best_pm, evaluate_measurement(joint, 2, 2, QUBIT, pm).value)
    params, point = optimize_purification(beta_in, beta)
    return DiscordComparison(beta_in, beta, samples, seed, best, best_pm, point.w_d, params)
