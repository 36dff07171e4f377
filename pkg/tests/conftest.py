import numpy as np
import pytest

from sscn.problems import make_synthetic_logistic


@pytest.fixture(scope="session")
def logistic50():
    """The synthetic benchmark objective: 50 features, 200 samples, lam=0.1."""
    return make_synthetic_logistic(n_features=50, n_samples=200, lam=0.1, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
