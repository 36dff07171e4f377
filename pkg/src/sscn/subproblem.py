"""Exact global minimization of the restricted cubic model, with certificates."""

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .model import model_value

if os.environ.get("SSCN_PURE_PYTHON"):
    from ._secular import secular_solve

    _BACKEND = "python"
else:
    try:
        from ._secular_cy import secular_solve

        _BACKEND = "cython"
    except ImportError:
        from ._secular import secular_solve

        _BACKEND = "python"


def kernel_backend():
    """Name of the secular-kernel backend selected at import ('cython' or 'python')."""
    return _BACKEND


class HardCaseError(RuntimeError):
    """The dual formulation has no interior maximizer; use solve_global."""


@dataclass(frozen=True)
class SubproblemSolution:
    """Global minimizer of the cubic model with its optimality certificates.

    alpha = M*r/2 is the shift that makes h_star solve (Q + alpha I) h = -g;
    min_shifted_eig = lambda_min(Q + alpha I) certifies global optimality.
    q_spectral_norm is a byproduct of the eigendecomposition, kept so callers
    tracking curvature-norm estimates need not refactorize.
    """

    h_star: np.ndarray
    r: float
    alpha: float
    stationarity_residual: float
    min_shifted_eig: float
    hard_case: bool
    q_spectral_norm: float = 0.0


def _certify(model, h, lam_lo, lam_hi, hard):
    r = float(np.linalg.norm(h))
    alpha = 0.5 * model.M * r
    resid = float(np.linalg.norm(model.g_S + model.Q_S @ h + alpha * h))
    return SubproblemSolution(h, r, alpha, resid, float(lam_lo + alpha), hard,
                              max(abs(lam_lo), abs(lam_hi)))


def solve_global(model, tol=1e-5):
    """Exact global minimizer via eigendecomposition + secular equation (O(tau^3))."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    Q = model.Q_S
    g = model.g_S
    if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(g))):
        raise ValueError("non-finite entries in the model")
    lam, V = np.linalg.eigh(Q)
    gt = V.T @ g
    r, ht, hard, _ = secular_solve(lam, gt, model.M)
    h = V @ ht
    if hard:
        v1 = V[:, 0]
        # deterministic tie-break on the sphere of minimizers: the added
        # eigenvector direction gets a positive first nonzero entry
        k = int(np.argmax(np.abs(v1) > 1e-12))
        if v1[k] < 0:
            v1 = -v1
        t = math.sqrt(max(0.0, r * r - float(ht @ ht)))
        h = h + t * v1
    return _certify(model, h, lam[0], lam[-1], hard)


def solve_alpha_dual(model, tol=1e-5):
    """Cross-check solver: univariate concave maximization over the shift alpha.

    Maximizes -0.5 <(Q+aI)^{-1} g, g> - 2 a^3 / (3 M^2) over a with Q + aI
    positive definite, then h = -(Q+aI)^{-1} g. Its stationarity condition is
    ||h(a)|| = 2a/M, matching alpha = M r / 2. Raises HardCaseError when no
    interior maximizer exists.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    Q = model.Q_S
    g = model.g_S
    M = model.M
    tau = model.tau
    spectrum = np.linalg.eigvalsh(Q)
    lam1 = float(spectrum[0])
    lam_hi = float(spectrum[-1])
    gnorm = float(np.linalg.norm(g))
    eye = np.eye(tau)

    if gnorm == 0.0:
        if lam1 >= 0.0:
            return _certify(model, np.zeros(tau), lam1, lam_hi, False)
        raise HardCaseError("zero gradient with indefinite curvature")

    def step(a):
        try:
            return np.linalg.solve(Q + a * eye, -g)
        except np.linalg.LinAlgError:
            raise HardCaseError("shifted system singular at the definiteness boundary") from None

    def dual_slope(a):
        h = step(a)
        return 0.5 * float(h @ h) - 2.0 * a * a / (M * M)

    a_lo = max(0.0, -lam1) + 1e-12 * max(1.0, abs(lam1))
    if dual_slope(a_lo) <= 0.0:
        if lam1 >= 0.0:
            # maximizer at the PD boundary a -> max(0,-lam1)+ with vanishing step
            return _certify(model, step(a_lo), lam1, lam_hi, False)
        raise HardCaseError("dual slope nonpositive at the definiteness boundary")

    r_max = (-lam1 + math.sqrt(lam1 * lam1 + 2.0 * M * gnorm)) / M
    a_hi = max(a_lo * 2.0, 0.5 * M * r_max * 1.5, 1.0)
    for _ in range(64):
        if dual_slope(a_hi) < 0.0:
            break
        a_hi *= 2.0
    a_star = brentq(dual_slope, a_lo, a_hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    h = step(a_star)
    return _certify(model, h, lam1, lam_hi, False)


def closed_form_zero_curvature(g_S, M):
    """Step for Q = 0: h = -eta g with eta = sqrt(2 / (M ||g||)); zero at g = 0."""
    if M <= 0:
        raise ValueError("M must be > 0")
    g = np.asarray(g_S, dtype=np.float64)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        return np.zeros_like(g)
    return -math.sqrt(2.0 / (M * gnorm)) * g


def _polish_coordinate(model, h, bound):
    """Coordinate-descent polish on the model; each 1-D slice is solved by Brent."""
    Q = model.Q_S
    g = model.g_S
    M = model.M
    h = h.copy()
    for _ in range(60):
        moved = 0.0
        for i in range(h.size):
            hi = h[i]
            c2 = float(h @ h) - hi * hi
            a = g[i] + float(Q[i] @ h) - Q[i, i] * hi

            def slice_val(t):
                return a * t + 0.5 * Q[i, i] * t * t + M / 6.0 * (t * t + c2) ** 1.5

            res = minimize_scalar(slice_val, bounds=(-bound, bound), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < slice_val(hi):
                h[i] = res.x
                moved = max(moved, abs(res.x - hi))
        if moved < 1e-13:
            break
    return h


def brute_force_oracle(model, grid_radius, grid_points):
    """Independent verification oracle for tau <= 3: grid search plus local polish.

    Returns (best_h, best_value); best_value upper-bounds the global minimum
    by construction.
    """
    tau = model.tau
    if tau > 3:
        raise ValueError("brute_force_oracle supports tau <= 3 only")
    if grid_points < 100:
        raise ValueError("grid_points must be >= 100 per axis")
    if grid_radius <= 0:
        raise ValueError("grid_radius must be > 0")

    axis = np.linspace(-grid_radius, grid_radius, grid_points)
    # separable accumulation: never materialize the (P^tau, tau) point matrix
    def along(i, arr):
        shape = [1] * tau
        shape[i] = grid_points
        return arr.reshape(shape)

    g = model.g_S
    Q = model.Q_S
    vals = np.zeros((grid_points,) * tau)
    norm2 = np.zeros((grid_points,) * tau)
    for i in range(tau):
        vals += along(i, g[i] * axis + 0.5 * Q[i, i] * axis * axis)
        norm2 += along(i, axis * axis)
    for i in range(tau):
        for j in range(i + 1, tau):
            vals += along(i, Q[i, j] * axis) * along(j, axis)
    vals += model.f_at_x + model.M / 6.0 * norm2**1.5

    best = np.unravel_index(np.argmin(vals), vals.shape)
    h_grid = np.array([axis[b] for b in best])
    grid_val = float(vals[best])
    h = _polish_coordinate(model, h_grid, 2.0 * grid_radius)
    value = model_value(model, h)
    if grid_val < value:
        h, value = h_grid, grid_val
    return h, float(value)
