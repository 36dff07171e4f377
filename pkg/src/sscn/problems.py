"""Seeded synthetic problem generators used by the CLI and the test fixtures."""

import numpy as np

from .datasets import SparseDataset
from .objectives import Quadratic, RegularizedLogistic, SaddleQuartic


def make_synthetic_dataset(n_features=50, n_samples=200, seed=7, density=0.3):
    """Row-sparse classification data with labels drawn from a planted logistic model."""
    rng = np.random.default_rng(seed)
    w_true = rng.normal(size=n_features)
    rows = []
    labels = []
    for _ in range(n_samples):
        nnz = max(1, int(rng.binomial(n_features, density)))
        idx = np.sort(rng.choice(n_features, size=nnz, replace=False))
        vals = rng.normal(size=nnz)
        z = float(vals @ w_true[idx])
        y = 1 if rng.random() < 1.0 / (1.0 + np.exp(-z)) else -1
        rows.append(tuple((int(j), float(v)) for j, v in zip(idx, vals)))
        labels.append(y)
    return SparseDataset(n_features=n_features, n_samples=n_samples,
                         rows=tuple(rows), labels=tuple(labels))


def make_synthetic_logistic(n_features=50, n_samples=200, lam=0.1, seed=7,
                            density=0.3, normalize=True):
    data = make_synthetic_dataset(n_features, n_samples, seed, density)
    return RegularizedLogistic(data, lam=lam, normalize=normalize)


def make_quadratic(n=50, cond=100.0, seed=0):
    """Strictly convex diagonal quadratic with spectrum linspace(1, cond)."""
    rng = np.random.default_rng(seed)
    A = np.diag(np.linspace(1.0, cond, n))
    b = rng.normal(size=n)
    return Quadratic(A, b)


def make_saddle(n=10, scale=0.25):
    return SaddleQuartic(scale, n=n)
