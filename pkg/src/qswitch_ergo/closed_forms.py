"""Analytic results for switched thermalization of a qubit (gap 1).

These functions are written directly from the analytic expressions and do not
import the Kraus machinery, so comparing them with the simulated pipeline is a
genuine cross-check. ``b`` is the inverse temperature of the maps and ``b_in``
that of the input target marginal.
"""

from __future__ import annotations

import math

import numpy as np

CRITICAL_BETA = 0.5 * math.log(3.0)


def Z(b: float) -> float:
    """Qubit partition function 1 + e^{-b}."""
    return 1.0 + math.exp(-b)


def tau(b: float) -> np.ndarray:
    if math.isinf(b):
        return np.diag([1.0, 0.0]).astype(complex)
    return np.diag([1.0, math.exp(-b)]).astype(complex) / Z(b)


def ground_population(b: float) -> float:
    """p = 1 / (1 + e^{-b}); b = ln(p / (1 - p))."""
    return 1.0 / Z(b)


def _plus_minus():
    plus = np.full((2, 2), 0.5, dtype=complex)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
    return plus, minus


def two_switch_output(b_in: float, b: float) -> np.ndarray:
    """S(L_b, L_b)[tau_in x |+><+|] = 1/2[(t + t t_in t) x |+><+| + (t - t t_in t) x |-><-|]."""
    t, ti = tau(b), tau(b_in)
    plus, minus = _plus_minus()
    ttt = t @ ti @ t
    return 0.5 * (np.kron(t + ttt, plus) + np.kron(t - ttt, minus))


def two_switch_branches(b_in: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized target states after measuring the control in {|+>, |->}.

    These are (t +/- t t_in t) / 2, i.e.
    diag(1 +/- 1/(Z_b Z_in), e^{-b} (1 +/- e^{-(b + b_in)}/(Z_b Z_in))) / (2 Z_b),
    with the same sign in both entries.
    """
    return _diag_branches(b_in, b, excited_sign=1.0)


def _diag_branches(b_in: float, b: float, excited_sign: float) -> tuple[np.ndarray, np.ndarray]:
    zz = Z(b) * Z(b_in)
    eb = math.exp(-b)
    tail = math.exp(-(b + b_in)) / zz
    out = []
    for s in (1.0, -1.0):
        out.append(np.diag([1.0 + s / zz, eb * (1.0 + excited_sign * s * tail)]).astype(complex) / (2.0 * Z(b)))
    return out[0], out[1]


def two_switch_branches_as_printed(b_in: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Branches with opposite signs in the two entries.

    This is the classically correlated result; for the product input it does
    not follow from ``two_switch_output``.
    """
    return _diag_branches(b_in, b, excited_sign=-1.0)


def n_switch_output(b_in: float, b: float, n: int) -> np.ndarray:
    """Trace-one N-SWITCH output for tau_in x |g+><g+|.

    (1/N)[(t + (N-1) t t_in t) x G + (t - t t_in t) x (1 - G)] with G = |g+><g+|.
    """
    t, ti = tau(b), tau(b_in)
    g = np.full((n, n), 1.0 / n, dtype=complex)
    ttt = t @ ti @ t
    return (np.kron(t + (n - 1) * ttt, g) + np.kron(t - ttt, np.eye(n) - g)) / n


def n_switch_output_as_printed(b_in: float, b: float, n: int) -> np.ndarray:
    """The N-SWITCH output with the (N-1) weight on the complement term.

    Coincides with ``n_switch_output`` for N = 2 only; its trace exceeds one
    for N >= 3.
    """
    t, ti = tau(b), tau(b_in)
    g = np.full((n, n), 1.0 / n, dtype=complex)
    ttt = t @ ti @ t
    return (np.kron(t + (n - 1) * ttt, g) + (n - 1) * np.kron(t - ttt, np.eye(n) - g)) / n


def n_switch_branches(b_in: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized target states for the yes/no measurement on |g+>."""
    zz = Z(b) * Z(b_in)
    eb = math.exp(-b)
    tail = math.exp(-(b + b_in))
    yes = np.diag([1.0 + (n - 1) / zz, eb * (1.0 + (n - 1) * tail / zz)]) / (n * Z(b))
    no = (n - 1) * np.diag([1.0 - 1.0 / zz, eb * (1.0 - tail / zz)]) / (n * Z(b))
    return yes.astype(complex), no.astype(complex)


def wd_product(b_in: float, b: float, n: int = 2) -> float:
    """(N-1)/(N Z_b^2 Z_in) max{0, e^{-2b} - e^{-b_in}}."""
    if math.isinf(b_in):
        gap = math.exp(-2.0 * b)
        zin = 1.0
    else:
        gap = math.exp(-2.0 * b) - math.exp(-b_in)
        zin = Z(b_in)
    return (n - 1) / (n * Z(b) ** 2 * zin) * max(0.0, gap)


def product_bound(b_in: float, b: float) -> bool:
    """Nonzero daemonic ergotropy for the product input iff b_in > 2b."""
    return b_in > 2.0 * b


def classical_corr_input(b_in: float, psi) -> np.ndarray:
    """(|0><0| x |psi><psi| + e^{-b_in} |1><1| x |psi_perp><psi_perp|) / Z_in."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return (np.kron(p0, np.outer(psi, psi.conj())) + math.exp(-b_in) * np.kron(p1, np.outer(perp, perp.conj()))) / Z(b_in)


def classical_corr_output(b_in: float, b: float, psi) -> np.ndarray:
    """Switch output for the classically correlated input, with Z = diag(1, -1) on the control."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])])
    t = tau(b)
    pz = np.diag([1.0, -1.0]).astype(complex)
    k0 = np.diag([1.0, 0.0]).astype(complex)
    k1 = np.diag([0.0, 1.0]).astype(complex)
    P = np.outer(psi, psi.conj())
    Q = np.outer(perp, perp.conj())
    first = np.kron(t + t @ k0 @ t, P) + np.kron(t - t @ k0 @ t, pz @ P @ pz)
    second = np.kron(t + t @ k1 @ t, Q) + np.kron(t - t @ k1 @ t, pz @ Q @ pz)
    return (first + math.exp(-b_in) * second) / (2.0 * Z(b_in))


def classical_corr_branches(b_in: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized {|+>, |->} branches for psi = |+>.

    diag(1 +/- 1/(Z_b Z_in), e^{-b} (1 -/+ e^{-(b + b_in)}/(Z_b Z_in))) / (2 Z_b).
    """
    return _diag_branches(b_in, b, excited_sign=-1.0)


def wd_classical(b_in: float, b: float) -> float:
    """1/(2 Z_b^2 Z_in) max{0, e^{-2b} - e^{-b_in} + 2 e^{-(2b + b_in)}}."""
    gap = math.exp(-2.0 * b) - math.exp(-b_in) + 2.0 * math.exp(-(2.0 * b + b_in))
    return max(0.0, gap) / (2.0 * Z(b) ** 2 * Z(b_in))


def classical_bound(b_in: float, b: float) -> bool:
    """Nonzero daemonic ergotropy for classical correlations iff ln(e^{b_in} + 2) > 2b."""
    return math.log(math.exp(b_in) + 2.0) > 2.0 * b


def classical_forbidden_upper(b: float) -> float:
    """Upper end of the b_in range with no extractable work, ln(e^{2b} - 2); nan if none."""
    x = math.exp(2.0 * b) - 2.0
    return math.log(x) if x > 1.0 else float("nan")


def purification_vector(alpha: float, phi: float, b_in: float) -> np.ndarray:
    """(|0 psi> + e^{-b_in/2} |1 psi_perp>) / sqrt(Z_in) on target x control."""
    psi = np.array([math.sqrt(alpha), np.exp(1j * phi) * math.sqrt(1.0 - alpha)])
    perp = np.array([np.exp(-1j * phi) * math.sqrt(1.0 - alpha), -math.sqrt(alpha)])
    amp = 0.0 if math.isinf(b_in) else math.exp(-0.5 * b_in)
    zin = 1.0 if math.isinf(b_in) else Z(b_in)
    return (np.kron([1.0, 0.0], psi) + amp * np.kron([0.0, 1.0], perp)) / math.sqrt(zin)


def purified_switch_output(alpha: float, phi: float, b: float, b_in: float) -> np.ndarray:
    """Explicit 4x4 switch output for the purified input, basis |target control>."""
    p, q = ground_population(b), ground_population(b_in)
    a = alpha
    sa = math.sqrt(a * (1.0 - a))
    sq = math.sqrt(q * (1.0 - q))
    e = lambda x: np.exp(1j * x)  # noqa: E731
    return np.array(
        [
            [p * (1 - a + q * (-1 + 2 * a)), e(-phi) * p**2 * q * sa, 0, -(1 - p) * p * a * sq],
            [e(phi) * p**2 * q * sa, p * (a + q * (1 - 2 * a)), e(2 * phi) * (1 - p) * p * (1 - a) * sq, 0],
            [0, e(-2 * phi) * (1 - p) * p * (1 - a) * sq, (1 - p) * (1 - a + q * (-1 + 2 * a)), -e(-phi) * (1 - p) ** 2 * (1 - q) * sa],
            [-(1 - p) * p * a * sq, 0, -e(phi) * (1 - p) ** 2 * (1 - q) * sa, (1 - p) * (a + q * (1 - 2 * a))],
        ],
        dtype=complex,
    )


def purified_switch_branches(alpha: float, phi: float, b: float, b_in: float) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized {|+>, |->} target branches of ``purified_switch_output``."""
    p, q = ground_population(b), ground_population(b_in)
    sa = math.sqrt(alpha * (1.0 - alpha))
    sq = math.sqrt(q * (1.0 - q))
    c = math.cos(phi)
    off = p * (1 - p) * sq * (np.exp(2j * phi) * (1 - alpha) - alpha)
    out = []
    for s in (1.0, -1.0):
        out.append(
            0.5
            * np.array(
                [
                    [p + s * 2 * c * p**2 * q * sa, s * off],
                    [s * np.conj(off), (1 - p) - s * 2 * c * (1 - p) ** 2 * (1 - q) * sa],
                ],
                dtype=complex,
            )
        )
    return out[0], out[1]


def wd_incoherent_purified(alpha: float, phi: float, b_in: float, b: float) -> float:
    """Incoherent daemonic ergotropy of the purified input under the {|+>, |->} measurement.

    Each branch contributes max{0, .}; the two brackets differ by the sign of
    2 cos(phi) sqrt(alpha (1 - alpha)) and at most one of them is positive.
    """
    k = 2.0 * math.cos(phi) * math.sqrt(alpha * (1.0 - alpha))
    base = math.exp(-2.0 * b) - math.exp(-b_in)
    tail = math.exp(-(2.0 * b + b_in))
    total = 0.0
    for s in (1.0, -1.0):
        total += max(0.0, base + (1.0 + s * k) * tail - (1.0 - s * k))
    return total / (2.0 * Z(b) ** 2 * Z(b_in))


def wd_coherent_purified(b_in: float, b: float) -> float:
    """Daemonic ergotropy for alpha in {0, 1} (purely coherent).

    1/2 tanh(b/2) (sqrt(1 + sinh^{-2}(b) cosh^{-2}(b_in/2) / 4) - 1).
    """
    if math.isinf(b_in) or math.isinf(b):
        return 0.0
    if b == 0.0:
        # tanh(b/2) / sinh(b) -> 1/2 as b -> 0.
        return 1.0 / (8.0 * math.cosh(0.5 * b_in))
    x = 1.0 / (4.0 * math.sinh(b) ** 2 * math.cosh(0.5 * b_in) ** 2)
    return 0.5 * math.tanh(0.5 * b) * (math.sqrt(1.0 + x) - 1.0)


def wd_purified_optimal(b_in: float, b: float) -> float:
    """Maximum over purifications: coherent branch for b_in <= 2b, classical value beyond."""
    return max(wd_coherent_purified(b_in, b), wd_classical(b_in, b))


def alpha_opt(b_in: float, b: float) -> tuple[float, ...]:
    return (0.0, 1.0) if b_in <= 2.0 * b else (0.5,)
