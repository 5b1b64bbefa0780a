import numpy as np
import pytest

from conftest import random_density
from qswitch_ergo import closed_forms as cf
from qswitch_ergo.qmat import DimensionError, partial_trace, projector, tensor
from qswitch_ergo.switch import (
    apply_switch,
    basis_projectors,
    build_n_switch,
    gamma_plus,
    measure_control,
    pm_basis,
    yes_no_projectors,
)
from qswitch_ergo.thermo import KrausChannel, gibbs, thermalizing_map


def pins(beta, n):
    return build_n_switch([thermalizing_map(beta)] * n)


def test_identity_channels():
    ident = KrausChannel((np.eye(2),))
    ops = build_n_switch([ident, ident]).kraus_ops
    assert len(ops) == 1
    assert np.array_equal(ops[0], np.eye(4))


def test_two_switch_kraus_form():
    # E_i E_j on control |0>, E_j E_i on control |1>.
    ch = thermalizing_map(0.9)
    sc = pins(0.9, 2)
    ops = sc.kraus_ops
    assert len(ops) == 16 and sc.joint_dim == 4
    for idx, s in enumerate(ops):
        i, j = divmod(idx, 4)
        ei, ej = ch.kraus_ops[i], ch.kraus_ops[j]
        expected = tensor(ei @ ej, np.diag([1.0, 0.0])) + tensor(ej @ ei, np.diag([0.0, 1.0]))
        assert np.array_equal(s, expected)


def test_three_switch_count():
    sc = pins(0.4, 3)
    assert sc.num_kraus == 64 and len(sc.kraus_ops) == 64
    assert sc.joint_dim == 6
    assert sc.completeness_residual() <= 1e-12


def test_completeness_up_to_six(rng):
    for n in range(2, 7):
        assert pins(rng.uniform(0, 3), n).completeness_residual() <= 1e-12


def test_build_errors():
    with pytest.raises(ValueError):
        build_n_switch([thermalizing_map(1.0)])
    qutrit = KrausChannel((np.eye(3),))
    with pytest.raises(DimensionError):
        build_n_switch([thermalizing_map(1.0), qutrit])


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_switch(pins(1.0, 2), np.eye(6) / 6)


def test_product_output_oracle():
    for beta, beta_in in [(0.5, 2.0), (1.0, 0.3), (2.5, 2.5)]:
        out = apply_switch(pins(beta, 2), tensor(gibbs(beta_in), projector(pm_basis()[0])))
        assert np.linalg.norm(out - cf.two_switch_output(beta_in, beta)) <= 1e-12


def test_n_switch_output_oracle():
    for n in range(2, 6):
        out = apply_switch(pins(0.7, n), tensor(gibbs(1.9), projector(gamma_plus(n))))
        assert np.linalg.norm(out - cf.n_switch_output(1.9, 0.7, n)) <= 1e-12


def test_printed_n_switch_output_is_not_a_state():
    # The extra (N - 1) on the complement term breaks unit trace for N >= 3.
    assert abs(np.trace(cf.n_switch_output_as_printed(1.9, 0.7, 2)) - 1.0) < 1e-12
    for n in (3, 4, 5):
        assert abs(np.trace(cf.n_switch_output_as_printed(1.9, 0.7, n)) - 1.0) > 1e-3


def test_trace_and_hermiticity_preserved(rng):
    sc = pins(1.1, 2)
    for _ in range(100):
        out = apply_switch(sc, random_density(rng, 4))
        assert abs(np.trace(out) - 1.0) <= 1e-12
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12


def test_batched_apply_matches_single(rng):
    sc = pins(0.6, 2)
    states = np.stack([random_density(rng, 4) for _ in range(3)])
    batched = apply_switch(sc, states)
    for s, b in zip(states, batched):
        assert np.allclose(apply_switch(sc, s), b, atol=1e-14)


def test_discarding_control_gives_thermal(rng):
    for n in (2, 3):
        sc = pins(1.3, n)
        joint = random_density(rng, 2 * n)
        assert np.linalg.norm(partial_trace(apply_switch(sc, joint), [2, n], keep=0) - gibbs(1.3)) <= 1e-12


def test_definite_order_pins_target():
    out = apply_switch(pins(0.8, 2), tensor(gibbs(0.1), np.diag([1.0, 0.0])))
    assert np.linalg.norm(partial_trace(out, [2, 2], keep=0) - gibbs(0.8)) <= 1e-12


def test_measure_product_output_in_pm_basis():
    out = apply_switch(pins(0.5, 2), tensor(gibbs(2.0), projector(pm_basis()[0])))
    branches = measure_control(out, 2, 2, basis_projectors(pm_basis()))
    assert abs(sum(p for p, _ in branches) - 1.0) <= 1e-12
    for (p, br), ref in zip(branches, cf.two_switch_branches(2.0, 0.5)):
        assert np.linalg.norm(br - ref) <= 1e-12
        assert abs(p - np.trace(br).real) <= 1e-15


def test_printed_product_branches_disagree_with_pipeline():
    out = apply_switch(pins(0.5, 2), tensor(gibbs(2.0), projector(pm_basis()[0])))
    branches = measure_control(out, 2, 2, basis_projectors(pm_basis()))
    printed = cf.two_switch_branches_as_printed(2.0, 0.5)
    assert max(np.linalg.norm(b - r) for (_, b), r in zip(branches, printed)) > 1e-3


def test_measure_computational_basis_gives_thermal_branches():
    out = apply_switch(pins(0.5, 2), tensor(gibbs(2.0), projector(pm_basis()[0])))
    for p, br in measure_control(out, 2, 2, basis_projectors(np.eye(2))):
        assert abs(p - 0.5) <= 1e-12
        assert np.linalg.norm(br / p - gibbs(0.5)) <= 1e-12


def test_measure_rejects_incomplete_set():
    with pytest.raises(ValueError):
        measure_control(np.eye(4) / 4, 2, 2, [np.diag([1.0, 0.0])])


def test_yes_no_projectors_complete():
    yes, no = yes_no_projectors(4)
    assert np.allclose(yes + no, np.eye(4))
    assert np.allclose(yes @ no, 0)
