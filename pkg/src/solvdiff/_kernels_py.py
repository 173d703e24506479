"""Pure-Python twin of the compiled ``_kernels`` module (same names, same results)."""

import math

import numpy as np

BACKEND = "python"


def _kahan_series(step, rel_tol, max_terms):
    s, comp, term, quiet = 1.0, 0.0, 1.0, 0
    for n in range(max_terms):
        term = step(term, n)
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if abs(term) <= rel_tol * abs(s):
            quiet += 1
            if quiet == 3:
                return s, n + 1
        else:
            quiet = 0
    return s, -1


def hyp2f1_series(a, b, c, z, rel_tol, max_terms):
    return _kahan_series(
        lambda t, n: t * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z, rel_tol, max_terms)


def hyp1f1_series(a, b, z, rel_tol, max_terms):
    return _kahan_series(
        lambda t, n: t * (a + n) / ((b + n) * (n + 1.0)) * z, rel_tol, max_terms)


def bessel_i_tail(nu, z, rel_tol, max_terms):
    q = 0.25 * z * z
    return _kahan_series(
        lambda t, k: t * q / ((k + 1.0) * (nu + k + 1.0)), rel_tol, max_terms)


def _map(fn, z):
    out = np.empty(len(z))
    failed = 0
    for i, zi in enumerate(z):
        out[i], used = fn(float(zi))
        failed += used < 0
    return out, failed


def hyp2f1_series_array(a, b, c, z, rel_tol, max_terms):
    return _map(lambda zi: hyp2f1_series(a, b, c, zi, rel_tol, max_terms), z)


def hyp1f1_series_array(a, b, z, rel_tol, max_terms):
    return _map(lambda zi: hyp1f1_series(a, b, zi, rel_tol, max_terms), z)


def bessel_i_tail_array(nu, z, rel_tol, max_terms):
    return _map(lambda zi: bessel_i_tail(nu, zi, rel_tol, max_terms), z)


def u_integral_log(a, b, z, h, u_lo, u_hi):
    out = np.empty(len(z))
    half_pi = 0.5 * math.pi
    p = b - 1.0
    for i, zi in enumerate(z):
        c = ((p - zi) + math.sqrt((p - zi) ** 2 + 4.0 * a * zi)) / (2.0 * zi)
        lc = math.log(c)
        ref = -zi * c + a * lc + (b - a - 1.0) * math.log1p(c) + math.log(half_pi)
        acc, comp = 0.0, 0.0
        u = u_lo
        while u < u_hi:
            lt = lc + half_pi * math.sinh(u)
            et = math.exp(lt)
            lg = -zi * et + a * lt + (b - a - 1.0) * math.log1p(et) \
                + math.log(half_pi * math.cosh(u)) - ref
            if lg > -60.0:
                y = math.exp(lg) - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
            elif u > 0.0:
                break
            u += h
        out[i] = ref + math.log(h * acc)
    return out


def hermite_array(n, x):
    out = np.empty(len(x))
    for i, xi in enumerate(x):
        p0, p1 = 1.0, 2.0 * xi
        for k in range(1, n):
            p0, p1 = p1, 2.0 * xi * p1 - 2.0 * k * p0
        out[i] = p0 if n == 0 else p1
    return out


def laguerre_array(n, alpha, x):
    out = np.empty(len(x))
    for i, xi in enumerate(x):
        p0, p1 = 1.0, 1.0 + alpha - xi
        for k in range(1, n):
            p0, p1 = p1, ((2.0 * k + alpha + 1.0 - xi) * p1 - (k + alpha) * p0) / (k + 1.0)
        out[i] = p0 if n == 0 else p1
    return out


def jacobi_array(n, alpha, beta, x):
    out = np.empty(len(x))
    for i, xi in enumerate(x):
        p0 = 1.0
        p1 = 0.5 * ((alpha + beta + 2.0) * xi + alpha - beta)
        for k in range(1, n):
            s = 2.0 * k + alpha + beta
            an = 2.0 * (k + 1.0) * (k + alpha + beta + 1.0) / ((s + 1.0) * (s + 2.0))
            bn = (beta * beta - alpha * alpha) / (s * (s + 2.0))
            cn = 2.0 * (k + alpha) * (k + beta) / (s * (s + 1.0))
            p0, p1 = p1, ((xi - bn) * p1 - cn * p0) / an
        out[i] = p0 if n == 0 else p1
    return out
