# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels mirroring ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt, isinf

cnp.import_array()

cdef double GOLDEN = (sqrt(5.0) - 1.0) / 2.0
cdef double REFINE_HALF_WIDTH = 1e-6


cdef inline double _sign(double v) nogil:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


cdef double _power_sum(const double[::1] r, const double[::1] d, double lam, double p) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(r.shape[0]):
        acc += pow(fabs(r[i] - lam * d[i]), p)
    return acc


cdef double _slope(const double[::1] r, const double[::1] d, double lam, double p) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, e
    for i in range(r.shape[0]):
        e = r[i] - lam * d[i]
        acc += d[i] * _sign(e) * pow(fabs(e), p - 1.0)
    return -p * acc


cdef double _bisect_slope(const double[::1] r, const double[::1] d, double p,
                          double lo, double hi) nogil:
    cdef int it
    cdef double mid
    for it in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _slope(r, d, mid, p) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def segment_argmin(r_in, d_in, double p, double tol):
    cdef const double[::1] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef Py_ssize_t i
    cdef bint any_d = False
    for i in range(d.shape[0]):
        if d[i] != 0.0:
            any_d = True
            break
    if not any_d:
        return 0.0, pow(_power_sum(r, d, 0.0, p), 1.0 / p)

    cdef double a = 0.0, b = 1.0, c, e, fc, fe, lam, lo, hi, s_lo, s_hi, best, val, end
    c = b - GOLDEN * (b - a)
    e = a + GOLDEN * (b - a)
    fc = _power_sum(r, d, c, p)
    fe = _power_sum(r, d, e, p)
    while b - a > tol:
        if fc < fe:
            b = e
            e = c
            fe = fc
            c = b - GOLDEN * (b - a)
            fc = _power_sum(r, d, c, p)
        else:
            a = c
            c = e
            fc = fe
            e = a + GOLDEN * (b - a)
            fe = _power_sum(r, d, e, p)
    lam = 0.5 * (a + b)

    lo = lam - REFINE_HALF_WIDTH
    if lo < 0.0:
        lo = 0.0
    hi = lam + REFINE_HALF_WIDTH
    if hi > 1.0:
        hi = 1.0
    s_lo = _slope(r, d, lo, p)
    s_hi = _slope(r, d, hi, p)
    if s_lo <= 0.0 <= s_hi:
        if lo == 0.0 and s_lo >= 0.0:
            lam = 0.0
        elif hi == 1.0 and s_hi <= 0.0:
            lam = 1.0
        else:
            lam = _bisect_slope(r, d, p, lo, hi)
    else:
        if _slope(r, d, 0.0, p) >= 0.0:
            lam = 0.0
        elif _slope(r, d, 1.0, p) <= 0.0:
            lam = 1.0
        else:
            lam = _bisect_slope(r, d, p, 0.0, 1.0)

    best = _power_sum(r, d, lam, p)
    for end in (0.0, 1.0):
        val = _power_sum(r, d, end, p)
        if val < best:
            lam = end
            best = val
    return lam, pow(best, 1.0 / p)


cdef double _row_powdist(const double[:, ::1] X, Py_ssize_t i, Py_ssize_t j, double p, int mode) nogil:
    # mode 0: max norm, 1: p = 2, 2: general p; returns the p-th power of the distance
    cdef Py_ssize_t k
    cdef double acc = 0.0, v
    if mode == 0:
        for k in range(X.shape[1]):
            v = fabs(X[i, k] - X[j, k])
            if v > acc:
                acc = v
    elif mode == 1:
        for k in range(X.shape[1]):
            v = X[i, k] - X[j, k]
            acc += v * v
    else:
        for k in range(X.shape[1]):
            acc += pow(fabs(X[i, k] - X[j, k]), p)
    return acc


def farthest_point_traversal(points, double p, n_centers, Py_ssize_t start=0):
    cdef const double[:, ::1] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t m = min(int(n_centers), n)
    order_arr = np.empty(m, dtype=np.int64)
    radii_arr = np.empty(m, dtype=np.float64)
    if m == 0:
        return order_arr, radii_arr
    cdef long long[::1] order = order_arr
    cdef double[::1] radii = radii_arr
    # nearest distances kept as p-th powers: same ordering, no root per pair
    cdef double[::1] nearest = np.empty(n, dtype=np.float64)
    cdef int mode = 0 if isinf(p) else (1 if p == 2.0 else 2)
    cdef Py_ssize_t i, k, nxt, c
    cdef double dist, top
    with nogil:
        order[0] = start
        for i in range(n):
            nearest[i] = _row_powdist(X, i, start, p, mode)
        for k in range(m):
            if k > 0:
                c = order[k]
                for i in range(n):
                    dist = _row_powdist(X, i, c, p, mode)
                    if dist < nearest[i]:
                        nearest[i] = dist
            nxt = 0
            top = nearest[0]
            for i in range(1, n):
                if nearest[i] > top:
                    top = nearest[i]
                    nxt = i
            radii[k] = top if mode == 0 else (sqrt(top) if mode == 1 else pow(top, 1.0 / p))
            if k + 1 < m:
                order[k + 1] = nxt
    return order_arr, radii_arr


cdef double _lp_norm_shift(const double[::1] x, const double[::1] y, double u, double p) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(x.shape[0]):
        acc += pow(fabs(x[i] + u * y[i]), p)
    return pow(acc, 1.0 / p)


cdef void _normalize(double[::1] v, double p) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, nrm
    for i in range(v.shape[0]):
        acc += pow(fabs(v[i]), p)
    nrm = pow(acc, 1.0 / p)
    for i in range(v.shape[0]):
        v[i] = v[i] / nrm


cdef double _modulus_value(const double[::1] x, const double[::1] y, double u, double p) nogil:
    return 0.5 * (_lp_norm_shift(x, y, u, p) + _lp_norm_shift(x, y, -u, p)) - 1.0


def modulus_ascent(x_in, y_in, double u, double p, int sweeps, double step):
    x_arr = np.array(x_in, dtype=np.float64)
    y_arr = np.array(y_in, dtype=np.float64)
    cx_arr = np.empty_like(x_arr)
    cy_arr = np.empty_like(y_arr)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef double[::1] cx = cx_arr
    cdef double[::1] cy = cy_arr
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef int sweep, which, si
    cdef double best, val, sgn
    cdef bint improved, nonzero
    with nogil:
        _normalize(x, p)
        _normalize(y, p)
        best = _modulus_value(x, y, u, p)
        for sweep in range(sweeps):
            improved = False
            for which in range(2):
                for i in range(n):
                    for si in range(2):
                        sgn = 1.0 if si == 0 else -1.0
                        for j in range(n):
                            cx[j] = x[j]
                            cy[j] = y[j]
                        if which == 0:
                            cx[i] += sgn * step
                        else:
                            cy[i] += sgn * step
                        nonzero = False
                        for j in range(n):
                            if (cx[j] != 0.0 if which == 0 else cy[j] != 0.0):
                                nonzero = True
                                break
                        if not nonzero:
                            continue
                        _normalize(cx, p)
                        _normalize(cy, p)
                        val = _modulus_value(cx, cy, u, p)
                        if val > best:
                            best = val
                            for j in range(n):
                                x[j] = cx[j]
                                y[j] = cy[j]
                            improved = True
                            break
            if not improved:
                step *= 0.5
    return best, x_arr, y_arr
