"""Tests for covariance assembly, estimation, and Hermitian solves."""

import numpy as np
import pytest

import rzfbeam as rb
from rzfbeam import covariance as cv

from conftest import random_scenario


def test_analytic_covariance_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(8):
        scen, _ = random_scenario(rng)
        est = cv.analytic_covariance(scen)
        assert est.kind == "analytic"
        assert est.sample_count == 0
        expected = (scen.channels @ scen.source_cov @ scen.channels.conj().T
                    + scen.noise_power * np.eye(scen.n_sensors))
        np.testing.assert_allclose(est.matrix, expected, atol=1e-13)
        np.testing.assert_allclose(est.matrix, est.matrix.conj().T, atol=1e-13)
        assert np.linalg.eigvalsh(est.matrix).min() > 0.0


def test_sample_covariance_basic():
    scen, models = rb.build_toy(8, 3, rho=0.6)
    blk = rb.generate_block(scen, models, 4096, rng_seed=1)
    est = cv.sample_covariance(blk.snapshots)
    assert est.kind == "sample"
    assert est.sample_count == 4096
    np.testing.assert_allclose(est.matrix, est.matrix.conj().T, atol=1e-13)
    # definition: (1/K) sum of outer products
    direct = blk.snapshots @ blk.snapshots.conj().T / 4096
    np.testing.assert_allclose(est.matrix, direct, atol=1e-13)


def test_sample_covariance_converges_to_analytic():
    scen, models = rb.build_toy(8, 3, rho=0.6)
    truth = cv.analytic_covariance(scen).matrix
    blk = rb.generate_block(scen, models, 400_000, rng_seed=2)
    est = cv.sample_covariance(blk.snapshots).matrix
    rel = np.abs(est - truth).max() / np.abs(truth).max()
    assert rel < 0.02


def test_sample_covariance_rejects_bad_input():
    with pytest.raises(ValueError):
        cv.sample_covariance(np.zeros((4, 0), dtype=complex))
    with pytest.raises(ValueError):
        cv.sample_covariance(np.zeros(16, dtype=complex))


def test_covariance_matrix_accepts_estimate_or_array():
    scen, _ = rb.build_toy(4, 1, rho=0.5)
    est = cv.analytic_covariance(scen)
    np.testing.assert_array_equal(cv.covariance_matrix(est), est.matrix)
    arr = np.eye(3, dtype=complex)
    np.testing.assert_array_equal(cv.covariance_matrix(arr), arr)


def test_interference_gram():
    rng = np.random.default_rng(3)
    for _ in range(5):
        scen, _ = random_scenario(rng)
        gram = cv.interference_gram(scen)
        h_int = scen.interference_channels
        np.testing.assert_allclose(gram.gram, h_int.conj().T @ h_int, atol=1e-13)
        np.testing.assert_allclose(gram.sigma_max,
                                   np.linalg.svd(h_int, compute_uv=False)[0],
                                   rtol=1e-12)
        # normalized channels have largest singular value exactly one
        s = np.linalg.svd(gram.normalized_channels, compute_uv=False)
        np.testing.assert_allclose(s[0], 1.0, rtol=1e-12)
        np.testing.assert_allclose(gram.normalized_channels * gram.sigma_max,
                                   h_int, atol=1e-13)


def test_hermitian_solve_matches_numpy():
    rng = np.random.default_rng(4)
    for n in (2, 5, 12):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        hpd = a @ a.conj().T + n * np.eye(n)
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        np.testing.assert_allclose(cv.hermitian_solve(hpd, b),
                                   np.linalg.solve(hpd, b), rtol=1e-10)
        # matrix right-hand sides too
        bm = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
        np.testing.assert_allclose(cv.hermitian_solve(hpd, bm),
                                   np.linalg.solve(hpd, bm), rtol=1e-10)


def test_hermitian_solve_rejects_indefinite():
    with pytest.raises(np.linalg.LinAlgError):
        cv.hermitian_solve(np.diag([1.0, -1.0]).astype(complex),
                           np.ones(2, dtype=complex))
