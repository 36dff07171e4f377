"""Twice-differentiable objectives with coordinate-restricted derivative oracles."""

import numpy as np
import scipy.sparse.linalg


def as_indices(subset):
    """Accept a CoordinateSubset or a plain index array; return an intp array."""
    if hasattr(subset, "indices"):
        subset = subset.indices
    return np.asarray(subset, dtype=np.intp)


def _check_subset(idx, n):
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    if idx.min() < 0 or idx.max() >= n:
        raise ValueError("subset index out of range")


class ObjectiveState:
    """Caller-owned scratch for incremental evaluation along coordinate steps."""

    __slots__ = ("x",)

    def __init__(self, x):
        self.x = np.array(x, dtype=np.float64)


class ObjectiveOracle:
    """Interface: value, full/restricted gradient, restricted Hessian block.

    Implementations are immutable after construction; all mutable scratch
    lives in the state objects returned by :meth:`init_state`.
    """

    @property
    def n(self):
        raise NotImplementedError

    def value(self, x):
        raise NotImplementedError

    def grad_full(self, x):
        raise NotImplementedError

    def grad_subset(self, x, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        return self.grad_full(x)[idx]

    def hessian_full(self, x):
        raise NotImplementedError

    def hessian_block(self, x, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        return self.hessian_full(x)[np.ix_(idx, idx)]

    # Incremental protocol; the default recomputes from scratch. Dataset-backed
    # objectives override so one step costs O(nnz of touched columns + tau^2).
    def init_state(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected x of shape ({self.n},)")
        return ObjectiveState(x)

    def value_state(self, state):
        return self.value(state.x)

    def grad_subset_state(self, state, subset):
        return self.grad_subset(state.x, subset)

    def hessian_block_state(self, state, subset):
        return self.hessian_block(state.x, subset)

    def trial_value(self, state, subset, h):
        idx = as_indices(subset)
        xt = state.x.copy()
        xt[idx] += h
        return self.value(xt)

    def commit_step(self, state, subset, h):
        idx = as_indices(subset)
        state.x[idx] += h

    # Empirical Lipschitz estimates; analytic overrides where available.
    def estimate_grad_lipschitz(self, rng=None, n_pairs=20, radius=1.0, safety=2.0):
        rng = np.random.default_rng(0) if rng is None else rng
        best = 0.0
        for _ in range(n_pairs):
            x = rng.uniform(-radius, radius, self.n)
            y = rng.uniform(-radius, radius, self.n)
            d = np.linalg.norm(x - y)
            if d == 0:
                continue
            best = max(best, float(np.linalg.norm(self.grad_full(x) - self.grad_full(y))) / d)
        return safety * best

    def estimate_hess_lipschitz(self, rng=None, n_pairs=20, radius=1.0, safety=2.0):
        rng = np.random.default_rng(0) if rng is None else rng
        best = 0.0
        for _ in range(n_pairs):
            x = rng.uniform(-radius, radius, self.n)
            y = rng.uniform(-radius, radius, self.n)
            d = np.linalg.norm(x - y)
            if d == 0:
                continue
            gap = float(np.linalg.norm(self.hessian_full(x) - self.hessian_full(y), 2))
            best = max(best, gap / d)
        return safety * best


def _loss_terms(z):
    # log(1 + exp(-z)), stable on both tails
    return np.logaddexp(0.0, -z)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _curvature_weights(z):
    # sigma(z) * sigma(-z) = exp(-|z|) / (1 + exp(-|z|))^2
    e = np.exp(-np.abs(z))
    return e / (1.0 + e) ** 2


def _reg_terms(x):
    return x * x / (1.0 + x * x)


def _reg_grad(x):
    return 2.0 * x / (1.0 + x * x) ** 2


def _reg_curv(x):
    x2 = x * x
    return 2.0 * (1.0 - 3.0 * x2) / (1.0 + x2) ** 3


class _LogisticState(ObjectiveState):
    """Cached margins z_i = y_i <a_i, x> and the regularizer sum."""

    __slots__ = ("z", "reg_sum")

    def __init__(self, x, z, reg_sum):
        super().__init__(x)
        self.z = z
        self.reg_sum = reg_sum


class RegularizedLogistic(ObjectiveOracle):
    """Logistic loss with the bounded non-convex penalty lam * sum x_j^2/(1+x_j^2).

    With ``normalize`` the loss is averaged over samples (1/m); otherwise it
    is summed. The penalty is never rescaled.
    """

    def __init__(self, data, lam, normalize=True):
        if lam < 0:
            raise ValueError("lam must be >= 0")
        self.data = data
        self.lam = float(lam)
        self.normalize = bool(normalize)
        self._A = data.to_csr()
        self._Acsc = self._A.tocsc()
        self._y = data.label_array()
        self._scale = 1.0 / data.n_samples if normalize else 1.0

    @property
    def n(self):
        return self.data.n_features

    def _margins(self, x):
        return self._y * (self._A @ x)

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected x of shape ({self.n},)")
        z = self._margins(x)
        return self._scale * _loss_terms(z).sum() + self.lam * _reg_terms(x).sum()

    def grad_full(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = self._margins(x)
        u = -self._scale * self._y * _sigmoid(-z)
        return self._A.T @ u + self.lam * _reg_grad(x)

    def grad_subset(self, x, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        z = self._margins(np.asarray(x, dtype=np.float64))
        return self._grad_subset_from_margins(np.asarray(x, dtype=np.float64), z, idx)

    def _grad_subset_from_margins(self, x, z, idx):
        u = -self._scale * self._y * _sigmoid(-z)
        g = self._Acsc[:, idx].T @ u
        return g + self.lam * _reg_grad(x[idx])

    def hessian_block(self, x, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        x = np.asarray(x, dtype=np.float64)
        return self._hessian_block_from_margins(x, self._margins(x), idx)

    def _hessian_block_from_margins(self, x, z, idx):
        w = self._scale * _curvature_weights(z)
        scaled = self._Acsc[:, idx].multiply(np.sqrt(w)[:, None]).tocsr()
        block = (scaled.T @ scaled).toarray()
        block = 0.5 * (block + block.T)
        block[np.diag_indices_from(block)] += self.lam * _reg_curv(x[idx])
        return block

    def hessian_full(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = self._margins(x)
        w = self._scale * _curvature_weights(z)
        scaled = self._A.multiply(np.sqrt(w)[:, None]).tocsr()
        H = (scaled.T @ scaled).toarray()
        H = 0.5 * (H + H.T)
        H[np.diag_indices_from(H)] += self.lam * _reg_curv(x)
        return H

    # incremental protocol
    def init_state(self, x):
        x = np.array(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected x of shape ({self.n},)")
        return _LogisticState(x, self._margins(x), _reg_terms(x).sum())

    def value_state(self, state):
        return self._scale * _loss_terms(state.z).sum() + self.lam * state.reg_sum

    def grad_subset_state(self, state, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        return self._grad_subset_from_margins(state.x, state.z, idx)

    def hessian_block_state(self, state, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        return self._hessian_block_from_margins(state.x, state.z, idx)

    def _margin_delta(self, idx, h):
        return self._y * (self._Acsc[:, idx] @ h)

    def trial_value(self, state, subset, h):
        idx = as_indices(subset)
        z = state.z + self._margin_delta(idx, h)
        xs = state.x[idx]
        reg = state.reg_sum - _reg_terms(xs).sum() + _reg_terms(xs + h).sum()
        return self._scale * _loss_terms(z).sum() + self.lam * reg

    def commit_step(self, state, subset, h):
        idx = as_indices(subset)
        state.z += self._margin_delta(idx, h)
        xs = state.x[idx]
        state.reg_sum += _reg_terms(xs + h).sum() - _reg_terms(xs).sum()
        state.x[idx] += h

    def estimate_grad_lipschitz(self, rng=None, n_pairs=20, radius=1.0, safety=2.0):
        # 0.25 bounds sigma(z)sigma(-z); |r''| <= 2
        m, n = self._A.shape
        if min(m, n) > 2:
            smax = scipy.sparse.linalg.svds(self._A.astype(np.float64), k=1, return_singular_vectors=False)[0]
        else:
            smax = np.linalg.norm(self._A.toarray(), 2)
        return float(0.25 * self._scale * smax**2 + 2.0 * self.lam)


class Quadratic(ObjectiveOracle):
    """f(x) = 0.5 x'Ax + b'x with constant symmetric Hessian A."""

    def __init__(self, A, b):
        A = np.asarray(A, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if A.shape != (b.size, b.size):
            raise ValueError("A must be square and match b")
        if not np.allclose(A, A.T):
            raise ValueError("A must be symmetric")
        self.A = 0.5 * (A + A.T)
        self.b = b

    @property
    def n(self):
        return self.b.size

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * x @ (self.A @ x) + self.b @ x

    def grad_full(self, x):
        return self.A @ np.asarray(x, dtype=np.float64) + self.b

    def hessian_full(self, x):
        return self.A.copy()

    def hessian_block(self, x, subset):
        idx = as_indices(subset)
        _check_subset(idx, self.n)
        return self.A[np.ix_(idx, idx)]

    def estimate_grad_lipschitz(self, rng=None, n_pairs=20, radius=1.0, safety=2.0):
        return float(np.linalg.norm(self.A, 2))

    def estimate_hess_lipschitz(self, rng=None, n_pairs=20, radius=1.0, safety=2.0):
        return 0.0


class SaddleQuartic(ObjectiveOracle):
    """f(x) = x_0^2 - x_1^2 + s ||x||^4: a strict saddle at the origin.

    grad f(0) = 0 and lambda_min(hess f(0)) = -2, so failure to escape the
    origin is unambiguous in tests.
    """

    def __init__(self, scale, n=2):
        if n < 2:
            raise ValueError("n must be >= 2")
        if scale <= 0:
            raise ValueError("scale must be > 0")
        self.scale = float(scale)
        self._n = int(n)

    @property
    def n(self):
        return self._n

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        sq = x @ x
        return x[0] ** 2 - x[1] ** 2 + self.scale * sq * sq

    def grad_full(self, x):
        x = np.asarray(x, dtype=np.float64)
        g = 4.0 * self.scale * (x @ x) * x
        g[0] += 2.0 * x[0]
        g[1] -= 2.0 * x[1]
        return g

    def hessian_full(self, x):
        x = np.asarray(x, dtype=np.float64)
        H = 4.0 * self.scale * ((x @ x) * np.eye(self.n) + 2.0 * np.outer(x, x))
        H[0, 0] += 2.0
        H[1, 1] -= 2.0
        return H


def finite_diff_check(obj, x, subset, delta):
    """Max-norm gaps between analytic restricted derivatives and central differences."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    idx = as_indices(subset)
    x = np.asarray(x, dtype=np.float64)

    g = obj.grad_subset(x, idx)
    g_fd = np.empty_like(g)
    for t, j in enumerate(idx):
        xp = x.copy()
        xm = x.copy()
        xp[j] += delta
        xm[j] -= delta
        g_fd[t] = (obj.value(xp) - obj.value(xm)) / (2.0 * delta)
    grad_err = np.abs(g - g_fd).max()

    Q = obj.hessian_block(x, idx)
    Q_fd = np.empty_like(Q)
    for t, j in enumerate(idx):
        xp = x.copy()
        xm = x.copy()
        xp[j] += delta
        xm[j] -= delta
        Q_fd[:, t] = (obj.grad_subset(xp, idx) - obj.grad_subset(xm, idx)) / (2.0 * delta)
    hess_err = np.abs(Q - 0.5 * (Q_fd + Q_fd.T)).max()
    return grad_err, hess_err
