"""Solver checks against small dense oracles and recovery-rate properties."""

import itertools

import numpy as np
import pytest

from localcluster import SensingProblem, least_squares_on_support, subspace_pursuit
from localcluster.recovery import rip_probe


def best_support_by_enumeration(phi, y, s):
    """Exhaustive minimum-residual s-support least squares (the oracle)."""
    best = (np.inf, None, None)
    for supp in itertools.combinations(range(phi.shape[1]), s):
        supp = np.asarray(supp)
        c, *_ = np.linalg.lstsq(phi[:, supp], y, rcond=None)
        r = np.linalg.norm(phi[:, supp] @ c - y)
        if r < best[0]:
            best = (r, supp, c)
    return best


def test_identity_sensing_selects_largest_entries():
    y = np.array([0.0, 3.0, 0.0, 5.0])
    res = subspace_pursuit(SensingProblem(np.eye(4), y, 2))
    np.testing.assert_array_equal(res.support, [1, 3])
    np.testing.assert_allclose(res.x, y, atol=1e-12)
    assert res.residual_norm <= 1e-12


def test_zero_measurement_returns_zero_after_one_iteration():
    res = subspace_pursuit(SensingProblem(np.eye(4), np.zeros(4), 2))
    np.testing.assert_array_equal(res.x, 0.0)
    assert res.residual_norm == 0.0
    assert res.iterations == 1


def test_gaussian_recovery_matches_enumeration_oracle(rng):
    phi = rng.standard_normal((6, 12)) / np.sqrt(6.0)
    x0 = np.zeros(12)
    x0[[2, 9]] = [1.5, -2.0]
    y = phi @ x0
    res = subspace_pursuit(SensingProblem(phi, y, 2))
    _, supp, _ = best_support_by_enumeration(phi, y, 2)
    np.testing.assert_array_equal(res.support, supp)
    np.testing.assert_array_equal(res.support, [2, 9])
    assert np.linalg.norm(res.x - x0) <= 1e-8


def test_support_never_exceeds_sparsity(rng):
    for _ in range(20):
        m, n = 8, 20
        phi = rng.standard_normal((m, n))
        y = rng.standard_normal(m)
        s = int(rng.integers(1, 6))
        res = subspace_pursuit(SensingProblem(phi, y, s))
        assert res.support.size <= s
        off = np.ones(n, dtype=bool)
        off[res.support] = False
        np.testing.assert_array_equal(res.x[off], 0.0)


def test_result_beats_plain_correlation_estimate(rng):
    for _ in range(20):
        phi = rng.standard_normal((10, 30))
        y = rng.standard_normal(10)
        s = 4
        res = subspace_pursuit(SensingProblem(phi, y, s))
        corr = np.abs(phi.T @ y)
        init = np.sort(np.argsort(-corr, kind="stable")[:s])
        c = least_squares_on_support(phi, y, init)
        assert res.residual_norm <= np.linalg.norm(phi[:, init] @ c - y) + 1e-12


def test_exact_recovery_rate_on_gaussian_ensembles():
    s, n = 3, 40
    m = int(np.ceil(4 * s * np.log(n)))
    hits = 0
    for trial in range(200):
        rng = np.random.default_rng(1000 + trial)
        phi = rng.standard_normal((m, n)) / np.sqrt(m)
        x0 = np.zeros(n)
        x0[rng.choice(n, s, replace=False)] = rng.standard_normal(s) + np.sign(rng.standard_normal(s))
        res = subspace_pursuit(SensingProblem(phi, x0 @ phi.T, s))
        if np.linalg.norm(res.x - x0) <= 1e-6 * np.linalg.norm(x0):
            hits += 1
    assert hits >= 190


def test_noisy_recovery_stays_close():
    s, n = 3, 40
    m = int(np.ceil(4 * s * np.log(n)))
    hits = 0
    for trial in range(100):
        rng = np.random.default_rng(5000 + trial)
        phi = rng.standard_normal((m, n)) / np.sqrt(m)
        x0 = np.zeros(n)
        x0[rng.choice(n, s, replace=False)] = rng.standard_normal(s) + np.sign(rng.standard_normal(s))
        y = phi @ x0
        e = rng.standard_normal(m)
        y = y + e * (0.01 * np.linalg.norm(y) / np.linalg.norm(e))
        res = subspace_pursuit(SensingProblem(phi, y, s))
        if np.linalg.norm(res.x - x0) <= 0.1 * np.linalg.norm(x0):
            hits += 1
    assert hits >= 90


def test_identical_inputs_give_identical_results(rng):
    phi = rng.standard_normal((8, 24))
    y = rng.standard_normal(8)
    a = subspace_pursuit(SensingProblem(phi, y, 3))
    b = subspace_pursuit(SensingProblem(phi, y, 3))
    np.testing.assert_array_equal(a.support, b.support)
    np.testing.assert_array_equal(a.x, b.x)
    assert a.residual_norm == b.residual_norm


def test_sensing_problem_validation():
    with pytest.raises(ValueError):
        SensingProblem(np.eye(3), np.zeros(2), 1)
    with pytest.raises(ValueError):
        SensingProblem(np.eye(3), np.zeros(3), 0)
    with pytest.raises(ValueError):
        SensingProblem(np.eye(3), np.zeros(3), 4)


def test_least_squares_identity_support():
    c = least_squares_on_support(np.eye(2), np.array([7.0, 1.0]), [0])
    np.testing.assert_allclose(c, [7.0])


def test_least_squares_duplicate_columns_stay_finite():
    phi = np.array([[1.0, 1.0], [0.0, 0.0]])
    y = np.array([1.0, 0.0])
    c = least_squares_on_support(phi, y, [0, 1])
    assert np.all(np.isfinite(c))
    assert np.linalg.norm(phi @ c - y) <= 1e-6


def test_least_squares_matches_dense_reference(rng):
    phi = rng.standard_normal((5, 2))
    y = rng.standard_normal(5)
    c = least_squares_on_support(phi, y, [0, 1])
    ref, *_ = np.linalg.lstsq(phi, y, rcond=None)
    np.testing.assert_allclose(c, ref, atol=1e-9)


def test_least_squares_empty_support():
    assert least_squares_on_support(np.eye(3), np.zeros(3), []).size == 0


def test_sparse_wide_support_matches_dense_reference(rng):
    # wide enough to leave the dense small-support path
    import scipy.sparse as sp
    n = 400
    phi = sp.random(n, n, density=0.02, random_state=7, format="csr")
    phi = phi + sp.eye(n, format="csr")
    y = rng.standard_normal(n)
    supp = np.sort(rng.choice(n, 300, replace=False))
    c = least_squares_on_support(phi, y, supp)
    ref, *_ = np.linalg.lstsq(phi.toarray()[:, supp], y, rcond=None)
    np.testing.assert_allclose(c, ref, atol=1e-6)


def test_rip_probe_identity_is_isometry(rng):
    assert rip_probe(np.eye(10), 3, 50, rng) <= 1e-12


def test_rip_probe_scaled_identity(rng):
    assert abs(rip_probe(2.0 * np.eye(10), 3, 50, rng) - 3.0) <= 1e-12


def test_rip_probe_gaussian_range(rng):
    phi = rng.standard_normal((64, 128))
    phi /= np.linalg.norm(phi, axis=0, keepdims=True)
    est = rip_probe(phi, 4, 1000, rng)
    assert 0.0 < est < 1.0
