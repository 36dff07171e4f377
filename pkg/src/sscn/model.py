"""Assembly of the restricted cubic-regularized model from an objective and a subset."""

from dataclasses import dataclass

import numpy as np

from .objectives import as_indices


@dataclass(frozen=True)
class ExactCurvature:
    """Q = exact Hessian block at the current point."""


@dataclass(frozen=True)
class ZeroCurvature:
    """Q = 0; recovers gradient-style steps with cubic step-size selection."""


@dataclass(frozen=True)
class LazyCurvature:
    """Q = Hessian block at a stale anchor, refreshed every `period` iterations
    or when the iterate drifts more than `refresh_radius` from the anchor."""

    period: int = 5
    refresh_radius: float = float("inf")

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be >= 1")


@dataclass(frozen=True)
class FiniteDiffCurvature:
    """Q_ij = (grad(x + delta e_i) - grad(x))_j / delta on S, then symmetrized.

    delta=None picks 1e-4 * (1 + ||x||_inf) at build time.
    """

    delta: float | None = None

    def __post_init__(self):
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be > 0")


class LazyAnchor:
    """Mutable anchor cache owned by one optimizer run.

    Holds an objective state positioned at the anchor point so stale blocks
    are sliced from cached quantities instead of re-deriving them each step.
    """

    def __init__(self):
        self.x = None
        self.state = None
        self.iteration = -1

    def needs_refresh(self, spec, x, k):
        if self.x is None:
            return True
        if k - self.iteration >= spec.period:
            return True
        return np.max(np.abs(x - self.x)) > spec.refresh_radius

    def refresh(self, obj, x, k):
        self.x = np.array(x, dtype=np.float64)
        self.state = obj.init_state(x)
        self.iteration = k

    def hessian_block(self, obj, subset):
        return obj.hessian_block_state(self.state, subset)


def symmetrize(Q):
    return 0.5 * (Q + Q.T)


@dataclass(frozen=True)
class CubicModel:
    """m(h) = f_at_x + <g_S, h> + 0.5 <Q_S h, h> + (M/6) ||h||^3 on R^tau."""

    f_at_x: float
    g_S: np.ndarray
    Q_S: np.ndarray
    M: float
    subset: object
    sigma_bound: float | None = None

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be > 0")
        tau = self.g_S.size
        if self.Q_S.shape != (tau, tau):
            raise ValueError("Q_S must be tau x tau")
        if tau > 0 and np.max(np.abs(self.Q_S - self.Q_S.T)) > 1e-12 * (1.0 + np.max(np.abs(self.Q_S))):
            raise ValueError("Q_S must be symmetric")

    @property
    def tau(self):
        return self.g_S.size

    def with_weight(self, M):
        return CubicModel(self.f_at_x, self.g_S, self.Q_S, M, self.subset, self.sigma_bound)


def fd_hessian_block(obj, x, subset, delta):
    """Forward-difference curvature block on S, symmetrized."""
    idx = as_indices(subset)
    x = np.asarray(x, dtype=np.float64)
    g0 = obj.grad_subset(x, idx)
    Q = np.empty((idx.size, idx.size))
    for t, j in enumerate(idx):
        xp = x.copy()
        xp[j] += delta
        Q[t, :] = (obj.grad_subset(xp, idx) - g0) / delta
    return symmetrize(Q)


def build_model(obj, x, subset, spec, M, lazy_anchor=None, iteration=0, state=None, sigma_hint=None):
    """Build the tau-dimensional cubic model for the given curvature provider.

    `state` is an optional objective state positioned at x (incremental
    evaluation); `lazy_anchor` is required for LazyCurvature.
    """
    if M <= 0:
        raise ValueError("M must be > 0")
    idx = as_indices(subset)
    x = np.asarray(x, dtype=np.float64)

    if state is not None:
        f_x = obj.value_state(state)
        g = obj.grad_subset_state(state, idx)
    else:
        f_x = obj.value(x)
        g = obj.grad_subset(x, idx)

    sigma = sigma_hint
    if isinstance(spec, ExactCurvature):
        Q = obj.hessian_block_state(state, idx) if state is not None else obj.hessian_block(x, idx)
        Q = symmetrize(Q)
        if sigma is None:
            sigma = 0.0
    elif isinstance(spec, ZeroCurvature):
        Q = np.zeros((idx.size, idx.size))
    elif isinstance(spec, LazyCurvature):
        if lazy_anchor is None:
            raise ValueError("LazyCurvature requires a LazyAnchor cache")
        if lazy_anchor.needs_refresh(spec, x, iteration):
            lazy_anchor.refresh(obj, x, iteration)
        Q = symmetrize(lazy_anchor.hessian_block(obj, idx))
    elif isinstance(spec, FiniteDiffCurvature):
        delta = spec.delta if spec.delta is not None else 1e-4 * (1.0 + np.max(np.abs(x)))
        Q = fd_hessian_block(obj, x, idx, delta)
    else:
        raise TypeError(f"unknown curvature spec {spec!r}")

    return CubicModel(float(f_x), np.asarray(g, dtype=np.float64), Q, float(M), subset, sigma)


def model_value(model, h):
    h = np.asarray(h, dtype=np.float64)
    if h.size != model.tau:
        raise ValueError("h must have length tau")
    r = np.linalg.norm(h)
    return model.f_at_x + model.g_S @ h + 0.5 * h @ (model.Q_S @ h) + model.M / 6.0 * r**3


def model_gradient(model, h):
    h = np.asarray(h, dtype=np.float64)
    if h.size != model.tau:
        raise ValueError("h must have length tau")
    return model.g_S + model.Q_S @ h + 0.5 * model.M * np.linalg.norm(h) * h
