import math

import numpy as np
import pytest

from sscn.datasets import parse_libsvm
from sscn.objectives import Quadratic, RegularizedLogistic, SaddleQuartic, finite_diff_check
from sscn.problems import make_synthetic_dataset


def _empty_rows_data(n_features, n_samples=1):
    # all-empty rows: the loss contributes log(2) but no derivative terms
    return parse_libsvm("-1\n" * n_samples, n_features_hint=n_features)


def test_value_at_origin_is_log2(logistic50):
    assert math.isclose(logistic50.value(np.zeros(50)), math.log(2.0), rel_tol=1e-14)


def test_value_large_margin_asymptote():
    obj = RegularizedLogistic(parse_libsvm("+1 1:1\n"), lam=0.0)
    assert abs(obj.value(np.array([50.0])) - math.exp(-50.0)) < 1e-20


def test_regularizer_component_at_ones():
    data = make_synthetic_dataset(n_features=12, n_samples=20, seed=0)
    with_reg = RegularizedLogistic(data, lam=0.1)
    without = RegularizedLogistic(data, lam=0.0)
    x = np.ones(12)
    assert math.isclose(with_reg.value(x) - without.value(x), 0.1 * 12 * 0.5, rel_tol=1e-13)


def test_regularizer_gradient_values():
    obj = RegularizedLogistic(_empty_rows_data(4), lam=1.0)
    g0 = obj.grad_subset(np.zeros(4), np.arange(4))
    assert np.all(g0 == 0.0)
    g1 = obj.grad_subset(np.ones(4), np.array([2]))
    assert math.isclose(g1[0], 0.5, rel_tol=1e-15)  # 2*1/(1+1)^2


def test_regularizer_curvature_values():
    obj = RegularizedLogistic(_empty_rows_data(3), lam=1.0)
    Q0 = obj.hessian_block(np.zeros(3), np.arange(3))
    assert np.allclose(Q0, 2.0 * np.eye(3))
    Q1 = obj.hessian_block(np.ones(3), np.array([1]))
    assert math.isclose(Q1[0, 0], -0.5, rel_tol=1e-15)  # 2(1-3)/8: non-convexity


def test_loss_curvature_single_sample():
    obj = RegularizedLogistic(parse_libsvm("+1 1:1\n", n_features_hint=2), lam=0.0)
    Q = obj.hessian_block(np.zeros(2), np.array([0, 1]))
    assert np.allclose(Q, [[0.25, 0.0], [0.0, 0.0]])


def test_grad_subset_is_restriction(logistic50, rng):
    x = rng.normal(size=50)
    full = logistic50.grad_full(x)
    for tau in (1, 7, 50):
        idx = np.sort(rng.choice(50, size=tau, replace=False))
        assert np.array_equal(logistic50.grad_subset(x, idx), full[idx]) or \
            np.allclose(logistic50.grad_subset(x, idx), full[idx], rtol=0, atol=1e-15)


def test_hessian_block_matches_full_submatrix(logistic50, rng):
    x = rng.normal(size=50)
    H = logistic50.hessian_full(x)
    idx = np.sort(rng.choice(50, size=11, replace=False))
    block = logistic50.hessian_block(x, idx)
    assert np.allclose(block, H[np.ix_(idx, idx)], atol=1e-12)
    assert np.array_equal(block, block.T)


def test_value_nonnegative_when_normalized(logistic50, rng):
    for _ in range(10):
        assert logistic50.value(rng.normal(size=50) * 3) >= 0.0


def test_sum_vs_mean_normalization():
    data = make_synthetic_dataset(n_features=8, n_samples=17, seed=2)
    mean_obj = RegularizedLogistic(data, lam=0.3, normalize=True)
    sum_obj = RegularizedLogistic(data, lam=0.3, normalize=False)
    x = np.linspace(-1, 1, 8)
    reg = 0.3 * np.sum(x**2 / (1 + x**2))
    assert math.isclose(sum_obj.value(x) - reg, 17 * (mean_obj.value(x) - reg), rel_tol=1e-12)


def test_dimension_mismatch_raises(logistic50):
    with pytest.raises(ValueError):
        logistic50.value(np.zeros(3))
    with pytest.raises(ValueError):
        logistic50.grad_subset(np.zeros(50), np.array([60]))


def test_finite_diff_quadratic_exact(rng):
    quad = Quadratic(np.diag(np.linspace(1, 5, 6)), rng.normal(size=6))
    x = rng.normal(size=6)
    ge, he = finite_diff_check(quad, x, np.arange(6), 1e-5)
    assert ge <= 1e-8 * (1 + np.linalg.norm(quad.grad_full(x)))
    assert he <= 1e-6


def test_finite_diff_logistic(logistic50, rng):
    x = rng.uniform(-1, 1, 50)
    idx = np.sort(rng.choice(50, size=10, replace=False))
    ge, he = finite_diff_check(logistic50, x, idx, 1e-5)
    assert ge <= 1e-6 * (1 + np.abs(logistic50.grad_subset(x, idx)).max())
    assert he <= 1e-4 * (1 + np.abs(logistic50.hessian_block(x, idx)).max())


def test_finite_diff_saddle_origin():
    sad = SaddleQuartic(0.25, n=5)
    _, he = finite_diff_check(sad, np.zeros(5), np.array([0, 1]), 1e-5)
    assert he <= 1e-6
    lam_min = np.linalg.eigvalsh(sad.hessian_block(np.zeros(5), np.array([0, 1])))[0]
    assert math.isclose(lam_min, -2.0, abs_tol=1e-12)
    assert np.all(sad.grad_full(np.zeros(5)) == 0.0)


def test_finite_diff_rejects_bad_delta(logistic50):
    with pytest.raises(ValueError):
        finite_diff_check(logistic50, np.zeros(50), np.array([0]), 0.0)


def test_incremental_state_tracks_recompute(logistic50, rng):
    state = logistic50.init_state(np.zeros(50))
    x = np.zeros(50)
    for _ in range(25):
        idx = np.sort(rng.choice(50, size=9, replace=False))
        h = 0.3 * rng.normal(size=9)
        trial = logistic50.trial_value(state, idx, h)
        logistic50.commit_step(state, idx, h)
        x[idx] += h
        assert math.isclose(trial, logistic50.value_state(state), rel_tol=1e-12)
    assert np.array_equal(state.x, x)
    assert math.isclose(logistic50.value_state(state), logistic50.value(x), rel_tol=1e-10)
    idx = np.arange(0, 50, 5)
    assert np.allclose(logistic50.grad_subset_state(state, idx),
                       logistic50.grad_subset(x, idx), atol=1e-10)


def test_lipschitz_estimates(logistic50, rng):
    L1 = logistic50.estimate_grad_lipschitz()
    # upper bound: the largest Hessian eigenvalue anywhere stays below L1
    for _ in range(5):
        x = rng.uniform(-1, 1, 50)
        assert np.linalg.eigvalsh(logistic50.hessian_full(x))[-1] <= L1 + 1e-9
    L2 = logistic50.estimate_hess_lipschitz(rng, n_pairs=10)
    assert L2 > 0
    quad = Quadratic(np.eye(3), np.zeros(3))
    assert quad.estimate_hess_lipschitz() == 0.0
    assert quad.estimate_grad_lipschitz() == 1.0


def test_saddle_quartic_shape():
    sad = SaddleQuartic(0.25, n=3)
    x = np.array([0.0, math.sqrt(2.0), 0.0])
    assert math.isclose(sad.value(x), -1.0, rel_tol=1e-14)
    assert np.linalg.eigvalsh(sad.hessian_full(x))[0] >= -1e-12
    with pytest.raises(ValueError):
        SaddleQuartic(0.25, n=1)
