# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled series and recurrence kernels.

Every routine here has a line-for-line twin in ``_kernels_py``; the two are
interchangeable and selected in ``_backend``. Series kernels return the sum and
the number of terms used, with ``-1`` signalling that ``max_terms`` ran out.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cosh, exp, fabs, log, log1p, sinh, sqrt

cnp.import_array()

BACKEND = "cython"


cdef inline double _hyp2f1(double a, double b, double c, double z,
                           double rel_tol, long max_terms, long *used) noexcept nogil:
    cdef double s = 1.0, comp = 0.0, term = 1.0, y, t
    cdef long n = 0, quiet = 0
    while n < max_terms:
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        n += 1
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if fabs(term) <= rel_tol * fabs(s):
            quiet += 1
            if quiet == 3:
                used[0] = n
                return s
        else:
            quiet = 0
    used[0] = -1
    return s


cdef inline double _hyp1f1(double a, double b, double z,
                           double rel_tol, long max_terms, long *used) noexcept nogil:
    cdef double s = 1.0, comp = 0.0, term = 1.0, y, t
    cdef long n = 0, quiet = 0
    while n < max_terms:
        term = term * (a + n) / ((b + n) * (n + 1.0)) * z
        n += 1
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if fabs(term) <= rel_tol * fabs(s):
            quiet += 1
            if quiet == 3:
                used[0] = n
                return s
        else:
            quiet = 0
    used[0] = -1
    return s


cdef inline double _bessel_i_tail(double nu, double z,
                                  double rel_tol, long max_terms, long *used) noexcept nogil:
    # sum_k (z^2/4)^k / (k! (nu+1)_k); the caller multiplies by (z/2)^nu / Gamma(nu+1)
    cdef double q = 0.25 * z * z
    cdef double s = 1.0, comp = 0.0, term = 1.0, y, t
    cdef long k = 0, quiet = 0
    while k < max_terms:
        term = term * q / ((k + 1.0) * (nu + k + 1.0))
        k += 1
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if fabs(term) <= rel_tol * fabs(s):
            quiet += 1
            if quiet == 3:
                used[0] = k
                return s
        else:
            quiet = 0
    used[0] = -1
    return s


def hyp2f1_series(double a, double b, double c, double z, double rel_tol, long max_terms):
    cdef long used = 0
    cdef double v = _hyp2f1(a, b, c, z, rel_tol, max_terms, &used)
    return v, used


def hyp1f1_series(double a, double b, double z, double rel_tol, long max_terms):
    cdef long used = 0
    cdef double v = _hyp1f1(a, b, z, rel_tol, max_terms, &used)
    return v, used


def bessel_i_tail(double nu, double z, double rel_tol, long max_terms):
    cdef long used = 0
    cdef double v = _bessel_i_tail(nu, z, rel_tol, max_terms, &used)
    return v, used


def hyp2f1_series_array(double a, double b, double c, double[::1] z,
                        double rel_tol, long max_terms):
    cdef Py_ssize_t i, n = z.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef long used = 0, failed = 0
    with nogil:
        for i in range(n):
            o[i] = _hyp2f1(a, b, c, z[i], rel_tol, max_terms, &used)
            if used < 0:
                failed += 1
    return out, failed


def hyp1f1_series_array(double a, double b, double[::1] z,
                        double rel_tol, long max_terms):
    cdef Py_ssize_t i, n = z.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef long used = 0, failed = 0
    with nogil:
        for i in range(n):
            o[i] = _hyp1f1(a, b, z[i], rel_tol, max_terms, &used)
            if used < 0:
                failed += 1
    return out, failed


def bessel_i_tail_array(double nu, double[::1] z, double rel_tol, long max_terms):
    cdef Py_ssize_t i, n = z.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef long used = 0, failed = 0
    with nogil:
        for i in range(n):
            o[i] = _bessel_i_tail(nu, z[i], rel_tol, max_terms, &used)
            if used < 0:
                failed += 1
    return out, failed


def u_integral_log(double a, double b, double[::1] z, double h, double u_lo, double u_hi):
    """log of int_0^inf e^(-z t) t^(a-1) (1+t)^(b-a-1) dt by exp-sinh quadrature.

    The substitution t = c exp(pi/2 sinh u) puts the integrand peak c at u = 0;
    terms are summed relative to the value there to stay in range.
    """
    cdef Py_ssize_t i, n = z.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double zi, c, lc, ref, acc, comp, y, t, u, lt, lg, p = b - 1.0
    cdef double half_pi = 1.5707963267948966
    with nogil:
        for i in range(n):
            zi = z[i]
            c = ((p - zi) + sqrt((p - zi) * (p - zi) + 4.0 * a * zi)) / (2.0 * zi)
            lc = log(c)
            ref = -zi * c + a * lc + (b - a - 1.0) * log1p(c) + log(half_pi)
            acc = 0.0
            comp = 0.0
            u = u_lo
            while u < u_hi:
                lt = lc + half_pi * sinh(u)
                lg = -zi * exp(lt) + a * lt + (b - a - 1.0) * log1p(exp(lt)) \
                    + log(half_pi * cosh(u)) - ref
                if lg > -60.0:
                    y = exp(lg) - comp
                    t = acc + y
                    comp = (t - acc) - y
                    acc = t
                elif u > 0.0:
                    break
                u += h
            o[i] = ref + log(h * acc)
    return out


def hermite_array(long n, double[::1] x):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef long k
    cdef double p0, p1, p2
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            p0 = 1.0
            p1 = 2.0 * x[i]
            if n == 0:
                o[i] = p0
                continue
            for k in range(1, n):
                p2 = 2.0 * x[i] * p1 - 2.0 * k * p0
                p0 = p1
                p1 = p2
            o[i] = p1
    return out


def laguerre_array(long n, double alpha, double[::1] x):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef long k
    cdef double p0, p1, p2
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            p0 = 1.0
            p1 = 1.0 + alpha - x[i]
            if n == 0:
                o[i] = p0
                continue
            for k in range(1, n):
                p2 = ((2.0 * k + alpha + 1.0 - x[i]) * p1 - (k + alpha) * p0) / (k + 1.0)
                p0 = p1
                p1 = p2
            o[i] = p1
    return out


def jacobi_array(long n, double alpha, double beta, double[::1] x):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef long k
    cdef double p0, p1, p2, s, an, bn, cn
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            p0 = 1.0
            p1 = 0.5 * ((alpha + beta + 2.0) * x[i] + alpha - beta)
            if n == 0:
                o[i] = p0
                continue
            for k in range(1, n):
                s = 2.0 * k + alpha + beta
                an = 2.0 * (k + 1.0) * (k + alpha + beta + 1.0) / ((s + 1.0) * (s + 2.0))
                bn = (beta * beta - alpha * alpha) / (s * (s + 2.0))
                cn = 2.0 * (k + alpha) * (k + beta) / (s * (s + 1.0))
                p2 = ((x[i] - bn) * p1 - cn * p0) / an
                p0 = p1
                p1 = p2
            o[i] = p1
    return out
