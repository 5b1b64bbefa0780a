import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_hermitian
from qswitch_ergo.qmat import (
    DimensionError,
    NotHermitianError,
    check_density,
    eig_hermitian,
    eigen_residuals,
    ket,
    partial_trace,
    projector,
    tensor,
)

Z = np.diag([1.0, -1.0])


def test_tensor_identity():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_projector_placement():
    out = tensor(projector(ket(0, 2)), projector(ket(1, 2)))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.array_equal(out, expected)


def test_tensor_sign_pattern():
    assert np.array_equal(tensor(Z, Z), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_tensor_left_fold_is_exact(rng):
    a, b, c = (random_hermitian(rng, 2) for _ in range(3))
    assert np.array_equal(tensor(a, b, c), tensor(tensor(a, b), c))


def test_partial_trace_product(rng):
    rho, sigma = random_density(rng, 2), random_density(rng, 3)
    assert np.allclose(partial_trace(tensor(rho, sigma), [2, 3], keep=0), rho, atol=1e-12)
    assert np.allclose(partial_trace(tensor(rho, sigma), [2, 3], keep=1), sigma, atol=1e-12)


def test_partial_trace_bell_marginal():
    phi = (ket(0, 4) + ket(3, 4)) / np.sqrt(2)
    assert np.allclose(partial_trace(projector(phi), [2, 2], keep=1), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_recovers_scaled_factor(rng):
    for _ in range(20):
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
        out = partial_trace(tensor(a, b), [2, 3], keep=0)
        assert np.max(np.abs(out - a * np.trace(b))) <= 1e-12


def test_partial_trace_three_parties_and_trace(rng):
    rho = random_density(rng, 12)
    mid = partial_trace(rho, [2, 3, 2], keep=1)
    assert mid.shape == (3, 3)
    assert abs(np.trace(mid) - 1.0) <= 1e-12


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), [2, 3], keep=0)


def test_eig_diagonal():
    es = eig_hermitian(np.diag([0.3, 0.7]))
    assert np.allclose(es.eigenvalues, [0.7, 0.3], atol=1e-15)


def test_eig_rank_one():
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    es = eig_hermitian(projector(plus))
    assert np.allclose(es.eigenvalues, [1.0, 0.0], atol=1e-14)
    assert abs(abs(np.vdot(es.eigenvectors[:, 0], plus)) - 1.0) < 1e-12


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_matches_numpy(rng):
    for d in (2, 3, 4, 8, 12):
        m = random_hermitian(rng, d)
        es = eig_hermitian(m)
        assert np.allclose(es.eigenvalues, np.linalg.eigvalsh(m)[::-1], atol=1e-10)


def test_eig_degenerate_spectrum():
    es = eig_hermitian(np.eye(3))
    rec, orth = eigen_residuals(np.eye(3), es)
    assert rec <= 1e-12 and orth <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_eig_invariants_property(d, seed):
    m = random_hermitian(np.random.default_rng(seed), d)
    es = eig_hermitian(m)
    rec, orth = eigen_residuals(m, es)
    assert rec <= 1e-10
    assert orth <= 1e-10
    assert np.all(np.diff(es.eigenvalues) <= 0)
    assert abs(es.eigenvalues.sum() - np.trace(m).real) <= 1e-10


def test_check_density_rejects_bad_trace():
    with pytest.raises(ValueError):
        check_density(np.eye(2))
