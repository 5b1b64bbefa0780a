"""Analytic expressions against independent evaluations and the Kraus pipeline."""

import math

import numpy as np
import pytest

from qswitch_ergo import closed_forms as cf
from qswitch_ergo.ergotropy import ergotropy
from qswitch_ergo.qmat import partial_trace, projector
from qswitch_ergo.scenarios import (
    PurificationParams,
    apply_switch,
    classical_corr_input,
    purified_input,
    thermal_switch,
)
from qswitch_ergo.switch import basis_projectors, measure_control, pm_basis


def test_critical_beta_value():
    assert abs(cf.CRITICAL_BETA - 0.5493061443340549) < 1e-15


def test_product_value_reference():
    assert abs(cf.wd_product(2.0, 0.5) - 0.03968) < 5e-6


def test_product_value_direct():
    b, bi = 0.5, 2.0
    direct = (math.exp(-2 * b) - math.exp(-bi)) / (2 * (1 + math.exp(-b)) ** 2 * (1 + math.exp(-bi)))
    assert abs(cf.wd_product(bi, b) - direct) < 1e-16


def test_product_ratio():
    assert abs(cf.wd_product(3.0, 0.5, 4) / cf.wd_product(3.0, 0.5, 2) - 1.5) < 1e-14


def test_product_boundary_and_forbidden():
    for b in (0.2, 1.0, 2.0):
        assert cf.wd_product(2 * b, b) == 0.0
        assert cf.wd_product(b, b) == 0.0


def test_product_branches_from_output():
    out = cf.two_switch_output(2.0, 0.5)
    plus, minus = pm_basis()
    for v, br in zip((plus, minus), cf.two_switch_branches(2.0, 0.5)):
        p = np.kron(np.eye(2), projector(v))
        assert np.allclose(partial_trace(p @ out @ p, [2, 2], keep=0), br, atol=1e-15)


def test_printed_product_branches_match_classical_branches():
    for bi, b in [(2.0, 0.5), (0.3, 1.1)]:
        for a, c in zip(cf.two_switch_branches_as_printed(bi, b), cf.classical_corr_branches(bi, b)):
            assert np.allclose(a, c, atol=1e-15)


def test_classical_value_reference():
    b = 0.4
    expected = (3 * math.exp(-0.8) - 1) / (2 * (1 + math.exp(-b)) ** 2 * 2)
    assert abs(cf.wd_classical(0.0, b) - expected) < 1e-16
    assert abs(expected - 0.03118) < 5e-6


def test_classical_forbidden_range_edge():
    edge = cf.classical_forbidden_upper(1.0)
    assert abs(edge - math.log(math.exp(2) - 2)) < 1e-15
    assert cf.wd_classical(edge, 1.0) <= 1e-17
    assert math.isnan(cf.classical_forbidden_upper(0.5))


def test_classical_large_beta_in_limit():
    b, bi = 0.5, 30.0
    gap = cf.wd_classical(bi, b) - cf.wd_product(bi, b)
    assert 0 < gap < 1e-13


def test_classical_output_structure():
    out = apply_switch(thermal_switch(0.7), classical_corr_input(1.2))
    assert np.allclose(out, cf.classical_corr_output(1.2, 0.7, pm_basis()[0]), atol=1e-12)
    branches = measure_control(out, 2, 2, basis_projectors(pm_basis()))
    for (_, br), ref in zip(branches, cf.classical_corr_branches(1.2, 0.7)):
        assert np.allclose(br, ref, atol=1e-12)
        assert abs(br[0, 1]) <= 1e-15


def test_classical_input_locally_thermal():
    for psi in (pm_basis()[0], np.array([0.6, 0.8j])):
        assert np.allclose(partial_trace(cf.classical_corr_input(0.9, psi), [2, 2], keep=0), cf.tau(0.9))


def test_purification_marginal():
    for alpha, phi in [(0.0, 0.0), (0.3, 1.0), (1.0, 2.0)]:
        v = cf.purification_vector(alpha, phi, 1.4)
        assert np.allclose(partial_trace(projector(v), [2, 2], keep=0), cf.tau(1.4), atol=1e-15)


def test_purified_switch_output_traces_to_thermal():
    for alpha, phi in [(0.2, 0.3), (0.7, 4.0)]:
        sq = cf.purified_switch_output(alpha, phi, 0.8, 2.1)
        assert abs(np.trace(sq) - 1.0) < 1e-14
        assert np.allclose(partial_trace(sq, [2, 2], keep=0), cf.tau(0.8), atol=1e-14)


def test_purified_output_against_pipeline(rng):
    pm = basis_projectors(pm_basis())
    for _ in range(10):
        b, bi = rng.uniform(0.1, 3.0, size=2)
        alpha, phi = rng.uniform(), rng.uniform(0, 2 * math.pi)
        out = apply_switch(thermal_switch(b), purified_input(bi, PurificationParams(alpha, phi)))
        assert np.max(np.abs(out - cf.purified_switch_output(alpha, phi, b, bi))) <= 1e-12
        for (_, br), ref in zip(measure_control(out, 2, 2, pm), cf.purified_switch_branches(alpha, phi, b, bi)):
            assert np.max(np.abs(br - ref)) <= 1e-12


def test_coherent_reference_value():
    v = cf.wd_coherent_purified(0.0, 1.0)
    assert abs(v - 0.5 * math.tanh(0.5) * (math.sqrt(1 + 0.25 / math.sinh(1) ** 2) - 1)) < 1e-16
    assert abs(v - 0.02004) < 5e-6


def test_coherent_limits():
    assert cf.wd_coherent_purified(math.inf, 1.0) == 0.0
    assert abs(cf.wd_coherent_purified(0.7, 0.0) - cf.wd_coherent_purified(0.7, 1e-10)) < 1e-9


def test_coherent_positive_for_finite_temperatures():
    for b in (0.01, 0.5, 3.0):
        for bi in (0.0, 1.0, 10.0):
            assert cf.wd_coherent_purified(bi, b) > 0


def test_incoherent_purified_against_branch_populations(rng):
    for _ in range(20):
        b, bi = rng.uniform(0.1, 3.0, size=2)
        alpha, phi = rng.uniform(), rng.uniform(0, 2 * math.pi)
        total = 0.0
        for br in cf.purified_switch_branches(alpha, phi, b, bi):
            total += max(0.0, br[1, 1].real - br[0, 0].real)
        assert abs(cf.wd_incoherent_purified(alpha, phi, bi, b) - total) <= 1e-15


def test_half_purification_equals_classical():
    for bi, b in [(3.0, 1.0), (2.5, 1.0), (0.5, 0.2)]:
        assert abs(cf.wd_incoherent_purified(0.5, 0.0, bi, b) - cf.wd_classical(bi, b)) <= 1e-16


def test_optimal_crossover_at_twice_beta():
    b = 1.0
    assert abs(cf.wd_coherent_purified(2 * b, b) - cf.wd_classical(2 * b, b)) < 1e-15
    assert cf.alpha_opt(1.9, b) == (0.0, 1.0)
    assert cf.alpha_opt(2.1, b) == (0.5,)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_branch_ergotropies_sum_to_closed_form(b):
    total = 0.0
    for br in cf.two_switch_branches(4 * b, b):
        p = np.trace(br).real
        total += p * ergotropy(br / p).total
    assert abs(total - cf.wd_product(4 * b, b)) < 1e-15
