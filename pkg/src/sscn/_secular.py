"""Pure-Python secular-equation kernel for the restricted cubic subproblem.

Works on the eigenbasis of the curvature block: given ascending eigenvalues
``lam`` and the rotated gradient ``gtilde``, finds the norm r of the global
minimizer of <g,h> + 0.5 h'diag(lam)h + (M/6)||h||^3 via the secular equation

    psi(r) := || (diag(lam) + (M r / 2) I)^{-1} gtilde || = r,   r >= r_lo := max(0, -2 lam_1 / M).

The root find runs in the pole distance s = r - r_lo with the exact
nonnegative spectral shifts lam_i - lam_1, which keeps full relative accuracy
both for tiny minimizers and near the hard case. The compiled twin in
``_secular_cy`` implements the identical algorithm.
"""

import math

import numpy as np

# |gtilde_i| below this fraction of ||gtilde|| on the minimal eigenspace
# triggers hard-case handling.
HARD_CASE_GRAD_TOL = 1e-12
# relative width of the eigenvalue cluster counted as the minimal eigenspace
EIG_CLUSTER_TOL = 1e-12
MAX_ITERS = 300
_EPS = np.finfo(float).eps


def _psi_and_slope(shift, g, half_m, s):
    """psi and the cubed-denominator sum at pole distance s (denominators
    shift_i + half_m * s are sums of nonnegative terms: no cancellation)."""
    s2 = 0.0
    s3 = 0.0
    for i in range(shift.size):
        gi = g[i]
        if gi == 0.0:
            continue
        den = shift[i] + half_m * s
        q = gi / den
        s2 += q * q
        s3 += q * q / den
    return math.sqrt(s2), s3


def _coeffs(shift, g, half_m, s):
    mask = g != 0.0
    out = np.zeros(shift.size)
    np.divide(-g, shift + half_m * s, out=out, where=mask)
    return out


def _upper_bound(lam1, M, gnorm):
    # largest root of (M/2) r^2 + lam1 r - gnorm = 0, evaluated without
    # cancellation on either sign of lam1
    disc = math.sqrt(lam1 * lam1 + 2.0 * M * gnorm)
    if lam1 <= 0.0:
        return (-lam1 + disc) / M
    return 2.0 * gnorm / (lam1 + disc)


def secular_solve(lam, gtilde, M):
    """Solve the secular equation.

    Returns ``(r, htilde, hard_case, iterations)``. In the hard case
    ``htilde`` holds only the pseudo-inverse part (zeros on the minimal
    eigenspace); the caller adds a minimal-eigenvector component of length
    sqrt(r^2 - ||htilde||^2).
    """
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    g = np.ascontiguousarray(gtilde, dtype=np.float64)
    tau = lam.size
    lam1 = lam[0]
    gnorm = math.sqrt(float(g @ g))
    half_m = 0.5 * M

    if gnorm == 0.0:
        if lam1 >= 0.0:
            return 0.0, np.zeros(tau), False, 0
        return -2.0 * lam1 / M, np.zeros(tau), True, 0

    if lam1 < 0.0:
        r_lo = -2.0 * lam1 / M
        shift = lam - lam1  # exact: both operands share the floating scale
    else:
        r_lo = 0.0
        shift = lam

    geff = g
    if lam1 < 0.0:
        scale = max(1.0, abs(lam1), abs(lam[-1]))
        cluster = lam - lam1 <= EIG_CLUSTER_TOL * scale
        if np.all(np.abs(g[cluster]) < HARD_CASE_GRAD_TOL * gnorm):
            geff = g.copy()
            geff[cluster] = 0.0
            psi_lo, _ = _psi_and_slope(shift, geff, half_m, 0.0)
            if psi_lo <= r_lo:
                return r_lo, _coeffs(shift, geff, half_m, 0.0), True, 0

    geff_norm = math.sqrt(float(geff @ geff))
    s_hi = max(_upper_bound(lam1, M, geff_norm) - r_lo, _EPS * r_lo, 1e-300)
    for _ in range(64):
        psi, _ = _psi_and_slope(shift, geff, half_m, s_hi)
        if psi - (r_lo + s_hi) <= 0.0:
            break
        s_hi *= 2.0

    lo, hi = 0.0, s_hi
    s = s_hi
    iters = 0
    for iters in range(1, MAX_ITERS + 1):
        psi, s3 = _psi_and_slope(shift, geff, half_m, s)
        r = r_lo + s
        phi = psi - r
        if phi > 0.0:
            lo = s
        else:
            hi = s
        if abs(phi) <= 4.0 * _EPS * r or hi - lo <= 4.0 * _EPS * hi:
            break
        dphi = -half_m * s3 / psi - 1.0 if psi > 0.0 else -1.0
        s_new = s - phi / dphi
        if not lo < s_new < hi:
            s_new = 0.5 * (lo + hi)
        s = s_new

    return r_lo + s, _coeffs(shift, geff, half_m, s), False, iters
