"""Coordinate-subset sampling, size schedules, and restriction/embedding operators."""

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np


@dataclass(frozen=True)
class CoordinateSubset:
    """Sorted index set S of a coordinate subspace of R^n."""

    indices: np.ndarray
    n: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        object.__setattr__(self, "indices", idx)
        if idx.size < 1 or idx.size > self.n:
            raise ValueError("subset cardinality must be in [1, n]")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] >= self.n:
            raise ValueError("index out of range")

    @property
    def tau(self):
        return int(self.indices.size)


def sample_uniform(n, tau, rng):
    """Uniformly random tau-subset of {0..n-1}, returned sorted.

    Generator algorithm is pinned to numpy's PCG64 ``Generator.choice``
    without replacement; identical seeds reproduce identical sequences.
    """
    if not 1 <= tau <= n:
        raise ValueError(f"tau={tau} out of range [1, {n}]")
    idx = rng.choice(n, size=tau, replace=False)
    idx.sort()
    return CoordinateSubset(idx, n)


def restrict_vector(x, subset):
    """Entries of x on S, in index order."""
    return np.asarray(x, dtype=np.float64)[subset.indices]


def embed_vector(h, subset, n):
    """Zero-filled embedding of a tau-vector back into R^n."""
    h = np.asarray(h, dtype=np.float64)
    if h.size != subset.tau:
        raise ValueError("length of h must equal tau(S)")
    out = np.zeros(n)
    out[subset.indices] = h
    return out


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Constant:
    tau: int


@dataclass(frozen=True)
class Exponential:
    """tau(k) = round(tau0 + c_e * exp(d * k)), clipped to [1, n]."""

    tau0: int
    c_e: float
    d: float


@dataclass(frozen=True)
class Adaptive:
    """Size rule driven by EMA estimates of gradient and curvature norms.

    eps1 = eps2 = c * ||h_{k-1}||^2; the proposed size is smoothed through
    tau_k = round(beta * tau_proposed + (1-beta) * tau_{k-1}).
    """

    c: float = 1.0
    ema_alpha: float = 0.2
    smooth_beta: float = 0.5
    tau_min: int = 1


@dataclass(frozen=True)
class ScheduleState:
    k: int = 0
    grad_norm_est: float = 0.0
    hess_norm_est: float = 0.0
    prev_step_norm: float = 0.0
    prev_tau_smoothed: float = 0.0


def _validate_schedule(schedule, n):
    if isinstance(schedule, Constant):
        if not 1 <= schedule.tau <= n:
            raise ValueError("Constant.tau out of [1, n]")
    elif isinstance(schedule, Exponential):
        if schedule.tau0 < 1 or schedule.c_e < 0 or schedule.d < 0:
            raise ValueError("Exponential requires tau0 >= 1, c_e >= 0, d >= 0")
    elif isinstance(schedule, Adaptive):
        if not (0 < schedule.ema_alpha <= 1 and 0 < schedule.smooth_beta <= 1):
            raise ValueError("Adaptive alpha/beta must lie in (0, 1]")
        if schedule.tau_min < 1:
            raise ValueError("Adaptive.tau_min must be >= 1")
    else:
        raise TypeError(f"unknown schedule {schedule!r}")


def adaptive_tau(grad_norm_est, hess_norm_est, eps1, eps2, n):
    """Smallest subset size whose expected sampling gaps stay below (eps1, eps2).

    tau/n >= max{1 - eps1^2/g^2, sqrt(1 - eps2/H^2)}; a branch with a zero
    estimate (or a negative bracket) contributes 0.
    """
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError("eps1 and eps2 must be > 0")
    grad_branch = 0.0
    if grad_norm_est > 0:
        grad_branch = 1.0 - (eps1 / grad_norm_est) ** 2
    hess_branch = 0.0
    if hess_norm_est > 0:
        hess_branch = math.sqrt(max(0.0, 1.0 - eps2 / hess_norm_est**2))
    frac = max(grad_branch, hess_branch, 0.0)
    return min(n, max(1, math.ceil(frac * n)))


def update_estimates(state, grad_subset_norm, hess_block_norm, ema_alpha):
    """EMA update of the tracked norms; the first observation initializes directly."""
    if grad_subset_norm < 0 or hess_block_norm < 0:
        raise ValueError("norms must be >= 0")
    a = ema_alpha
    g_old, h_old = state.grad_norm_est, state.hess_norm_est
    g_new = grad_subset_norm if g_old == 0.0 else a * grad_subset_norm + (1 - a) * g_old
    h_new = hess_block_norm if h_old == 0.0 else a * hess_block_norm + (1 - a) * h_old
    return replace(state, grad_norm_est=g_new, hess_norm_est=h_new)


def bootstrap_tau(n):
    """First-iteration size for the adaptive schedule (no previous step exists)."""
    return max(1, math.ceil(0.05 * n))


def next_tau(schedule, state, n):
    """Subset size for iteration state.k under the given schedule."""
    _validate_schedule(schedule, n)
    if isinstance(schedule, Constant):
        return schedule.tau
    if isinstance(schedule, Exponential):
        raw = schedule.tau0 + schedule.c_e * math.exp(min(schedule.d * state.k, 700.0))
        return int(min(n, max(1, round(raw))))
    # Adaptive
    if state.k == 0 or state.prev_step_norm == 0.0:
        tau = bootstrap_tau(n)
        return int(min(n, max(schedule.tau_min, tau)))
    eps = schedule.c * state.prev_step_norm**2
    proposed = adaptive_tau(state.grad_norm_est, state.hess_norm_est, eps, eps, n)
    prev = state.prev_tau_smoothed if state.prev_tau_smoothed > 0 else float(proposed)
    smoothed = schedule.smooth_beta * proposed + (1 - schedule.smooth_beta) * prev
    return int(min(n, max(schedule.tau_min, round(smoothed))))


def smoothed_tau_value(schedule, state, tau_emitted):
    """Value to carry as prev_tau_smoothed after emitting tau_emitted."""
    if isinstance(schedule, Adaptive):
        return float(tau_emitted)
    return state.prev_tau_smoothed


# ---------------------------------------------------------------------------
# sampling-gap identities and probes


def exact_grad_gap(g, tau):
    """E ||g - g_[S]||^2 = (1 - tau/n) ||g||^2 under uniform tau-subsets."""
    g = np.asarray(g, dtype=np.float64)
    n = g.size
    return (1.0 - tau / n) * float(g @ g)


def exact_hessian_gap(H, tau):
    """E ||H_[S] - H||_F^2, exact for any symmetric H.

    Diagonal entries survive with probability tau/n, off-diagonal ones with
    p2 = tau(tau-1)/(n(n-1)); (1 - p2)||H||_F^2 is the zero-diagonal special
    case (and an upper bound otherwise).
    """
    H = np.asarray(H, dtype=np.float64)
    n = H.shape[0]
    p1 = tau / n
    p2 = tau * (tau - 1) / (n * (n - 1)) if n > 1 else p1
    diag_sq = float(np.sum(np.diag(H) ** 2))
    total_sq = float(np.sum(H * H))
    return (1.0 - p1) * diag_sq + (1.0 - p2) * (total_sq - diag_sq)


def p2_pair_probability(n, tau):
    return tau * (tau - 1) / (n * (n - 1))


def concentration_probe(g, H, tau, trials, rng):
    """Monte-Carlo means of ||g - g_[S]||^2 and ||H_[S] - H||_F^2."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = np.asarray(g, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    n = g.size
    if not 1 <= tau <= n:
        raise ValueError("tau out of range")
    g_sq = g * g
    H_sq = H * H
    g_total = g_sq.sum()
    H_total = H_sq.sum()
    grad_acc = 0.0
    hess_acc = 0.0
    for _ in range(trials):
        idx = sample_uniform(n, tau, rng).indices
        grad_acc += g_total - g_sq[idx].sum()
        hess_acc += H_total - H_sq[np.ix_(idx, idx)].sum()
    return grad_acc / trials, hess_acc / trials


def enumerate_hessian_gap(H, tau):
    """Exhaustive mean of ||H_[S] - H||_F^2 over all tau-subsets (small n only)."""
    H = np.asarray(H, dtype=np.float64)
    n = H.shape[0]
    H_sq = H * H
    total = H_sq.sum()
    vals = [total - H_sq[np.ix_(idx, idx)].sum() for idx in combinations(range(n), tau)]
    return float(np.mean(vals))


def enumerate_grad_gap(g, tau):
    """Exhaustive mean of ||g - g_[S]||^2 over all tau-subsets (small n only)."""
    g = np.asarray(g, dtype=np.float64)
    g_sq = g * g
    total = g_sq.sum()
    vals = [total - g_sq[list(idx)].sum() for idx in combinations(range(g.size), tau)]
    return float(np.mean(vals))
