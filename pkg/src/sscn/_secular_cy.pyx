# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled secular-equation kernel; mirrors sscn._secular.secular_solve."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

DEF HARD_CASE_GRAD_TOL = 1e-12
DEF EIG_CLUSTER_TOL = 1e-12
DEF MAX_ITERS = 300
DEF EPS = 2.220446049250313e-16


cdef inline double _psi(const double[::1] shift, const double[::1] g, double half_m,
                        double s, double* s3_out) nogil:
    cdef Py_ssize_t i, tau = shift.shape[0]
    cdef double s2 = 0.0, s3 = 0.0, den, q
    for i in range(tau):
        if g[i] == 0.0:
            continue
        den = shift[i] + half_m * s
        q = g[i] / den
        s2 += q * q
        s3 += q * q / den
    s3_out[0] = s3
    return sqrt(s2)


cdef cnp.ndarray[double, ndim=1] _coeffs(const double[::1] shift, const double[::1] g,
                                          double half_m, double s):
    cdef Py_ssize_t i, tau = shift.shape[0]
    cdef cnp.ndarray[double, ndim=1] ht = np.zeros(tau)
    for i in range(tau):
        if g[i] != 0.0:
            ht[i] = -g[i] / (shift[i] + half_m * s)
    return ht


cdef inline double _upper_bound(double lam1, double M, double gnorm) nogil:
    cdef double disc = sqrt(lam1 * lam1 + 2.0 * M * gnorm)
    if lam1 <= 0.0:
        return (-lam1 + disc) / M
    return 2.0 * gnorm / (lam1 + disc)


def secular_solve(lam_in, gtilde_in, double M):
    cdef cnp.ndarray[double, ndim=1] lam_arr = np.ascontiguousarray(lam_in, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] g_arr = np.ascontiguousarray(gtilde_in, dtype=np.float64)
    cdef double[::1] lam = lam_arr
    cdef Py_ssize_t tau = lam.shape[0]
    cdef Py_ssize_t i
    cdef double lam1 = lam[0]
    cdef double half_m = 0.5 * M
    cdef double gnorm = 0.0

    for i in range(tau):
        gnorm += g_arr[i] * g_arr[i]
    gnorm = sqrt(gnorm)

    if gnorm == 0.0:
        if lam1 >= 0.0:
            return 0.0, np.zeros(tau), False, 0
        return -2.0 * lam1 / M, np.zeros(tau), True, 0

    cdef double r_lo
    cdef cnp.ndarray[double, ndim=1] shift_arr
    if lam1 < 0.0:
        r_lo = -2.0 * lam1 / M
        shift_arr = lam_arr - lam1
    else:
        r_lo = 0.0
        shift_arr = lam_arr
    cdef double[::1] shift = shift_arr

    cdef cnp.ndarray[double, ndim=1] geff_arr = g_arr
    cdef double scale, psi_lo, s3
    cdef bint tiny_on_cluster
    if lam1 < 0.0:
        scale = max(1.0, fabs(lam1))
        if fabs(lam[tau - 1]) > scale:
            scale = fabs(lam[tau - 1])
        tiny_on_cluster = True
        for i in range(tau):
            if lam[i] - lam1 <= EIG_CLUSTER_TOL * scale:
                if fabs(g_arr[i]) >= HARD_CASE_GRAD_TOL * gnorm:
                    tiny_on_cluster = False
                    break
        if tiny_on_cluster:
            geff_arr = g_arr.copy()
            for i in range(tau):
                if lam[i] - lam1 <= EIG_CLUSTER_TOL * scale:
                    geff_arr[i] = 0.0
            psi_lo = _psi(shift, geff_arr, half_m, 0.0, &s3)
            if psi_lo <= r_lo:
                return r_lo, _coeffs(shift, geff_arr, half_m, 0.0), True, 0

    cdef double[::1] geff = geff_arr
    cdef double geff_norm = 0.0
    for i in range(tau):
        geff_norm += geff[i] * geff[i]
    geff_norm = sqrt(geff_norm)

    cdef double s_hi = _upper_bound(lam1, M, geff_norm) - r_lo
    if s_hi < EPS * r_lo:
        s_hi = EPS * r_lo
    if s_hi < 1e-300:
        s_hi = 1e-300
    cdef int j
    for j in range(64):
        if _psi(shift, geff, half_m, s_hi, &s3) - (r_lo + s_hi) <= 0.0:
            break
        s_hi *= 2.0

    cdef double lo = 0.0, hi = s_hi, s = s_hi
    cdef double psi, r, phi, dphi, s_new
    cdef int iters = 0
    for j in range(1, MAX_ITERS + 1):
        iters = j
        psi = _psi(shift, geff, half_m, s, &s3)
        r = r_lo + s
        phi = psi - r
        if phi > 0.0:
            lo = s
        else:
            hi = s
        if fabs(phi) <= 4.0 * EPS * r or hi - lo <= 4.0 * EPS * hi:
            break
        if psi > 0.0:
            dphi = -half_m * s3 / psi - 1.0
        else:
            dphi = -1.0
        s_new = s - phi / dphi
        if not (lo < s_new < hi):
            s_new = 0.5 * (lo + hi)
        s = s_new

    return r_lo + s, _coeffs(shift, geff, half_m, s), False, iters
