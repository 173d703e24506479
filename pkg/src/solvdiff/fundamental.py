"""Increasing and decreasing solutions of the resolvent equation L phi = lambda phi.

Derivatives are returned with respect to x; the Wronskian is taken with respect
to the matched scale ``s~' = 2 / (sigma^2 m)``, so that ``phi+ phi- / w`` is the
Green function with respect to the speed density used by :mod:`processes`.
At ``lambda = 0`` the pair is built from the scale function and the constant.
"""

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from . import processes as pr
from . import specfun as sf
from .errors import InvalidParameter, NonConvergence, Unsupported


@dataclass(frozen=True)
class FundamentalPair:
    process: pr.BaseProcess
    lam: float
    phi_plus: Callable
    phi_minus: Callable
    dphi_plus: Callable
    dphi_minus: Callable
    w: float
    u_limits: tuple = (0.0, math.inf)

    def matched_scale_density(self, x):
        return matched_scale_density(self.process, x)

    def wronskian(self, x):
        """(d phi+/ds) phi- - phi+ (d phi-/ds) at x."""
        x = np.asarray(x, dtype=float)
        num = self.dphi_plus(x) * self.phi_minus(x) - self.phi_plus(x) * self.dphi_minus(x)
        return num / matched_scale_density(self.process, x)


def matched_scale_density(p, x):
    x = np.asarray(x, dtype=float)
    return 2.0 / (p.vol(x) ** 2 * np.exp(p.log_speed(x)))


def _reference_points(p):
    d = p.domain
    if d.bounded:
        return d.lo + (d.hi - d.lo) * np.array([0.5, 0.1, 0.3, 0.45, 0.7, 0.9])
    if math.isfinite(d.lo):
        return d.lo + np.array([1.0, 0.1, 0.4, 0.8, 2.0, 4.0])
    if isinstance(p, pr.OU):
        sd = p.sigma / math.sqrt(2 * p.b)
        return p.mean + sd * np.array([0.0, -2.0, -1.0, 0.5, 1.0, 2.0])
    return np.array([0.0, -2.0, -1.0, 0.5, 1.0, 2.0])


# ---------------------------------------------------------------- per-process pairs

def _bm(p, lam):
    k = math.sqrt(2 * lam)
    return (lambda x: np.exp(k * np.asarray(x, dtype=float)),
            lambda x: np.exp(-k * np.asarray(x, dtype=float)),
            lambda x: k * np.exp(k * np.asarray(x, dtype=float)),
            lambda x: -k * np.exp(-k * np.asarray(x, dtype=float)))


def _ou(p, lam):
    a = lam / (2 * p.b)
    kap = p.kappa
    rk = math.sqrt(kap)
    g_half = sf.rgamma(0.5 + a) * math.sqrt(math.pi)
    g_a = sf.rgamma(a) * math.sqrt(math.pi)

    def f_minus(u):
        # decreasing solution in u = x - a/b; U past kappa u^2 = 1, where the M form starts to cancel
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(u)
        z = kap * u * u
        pos = (u > 0) & (z > 1.0)
        if pos.any():
            out[pos] = sf.tricomi_u(a, 0.5, z[pos])
        neg = ~pos
        if neg.any():
            zn, un = z[neg], u[neg]
            out[neg] = g_half * sf.kummer_m(a, 0.5, zn) - 2 * rk * un * g_a * sf.kummer_m(a + 0.5, 1.5, zn)
        return out

    def df_minus(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(u)
        z = kap * u * u
        pos = (u > 0) & (z > 1.0)
        if pos.any():
            up = u[pos]
            out[pos] = -2 * a * kap * up * sf.tricomi_u(a + 1, 1.5, z[pos])
        neg = ~pos
        if neg.any():
            zn, un = z[neg], u[neg]
            dm1 = 2 * a * sf.kummer_m(a + 1, 1.5, zn) * 2 * kap * un
            dm2 = sf.kummer_m(a + 0.5, 1.5, zn) + un * (a + 0.5) / 1.5 * sf.kummer_m(a + 1.5, 2.5, zn) * 2 * kap * un
            out[neg] = g_half * dm1 - 2 * rk * g_a * dm2
        return out

    def at(f, sign):
        def g(x):
            x = np.asarray(x, dtype=float)
            return f(sign * (x - p.mean)).reshape(x.shape)
        return g

    def flip(f):
        return lambda x: -f(x)

    # phi+(u) = phi-(-u)
    return at(f_minus, -1.0), at(f_minus, 1.0), flip(at(df_minus, -1.0)), at(df_minus, 1.0)


def _cir(p, lam):
    al, th = p.alpha, p.theta
    if not al > -1:
        raise Unsupported("CIR fundamental pair needs alpha > -1")
    a, c = lam / p.b, al + 1
    return (lambda x: sf.kummer_m(a, c, th * np.asarray(x, dtype=float)),
            lambda x: sf.tricomi_u(a, c, th * np.asarray(x, dtype=float)),
            lambda x: th * a / c * sf.kummer_m(a + 1, c + 1, th * np.asarray(x, dtype=float)),
            lambda x: -th * a * sf.tricomi_u(a + 1, c + 1, th * np.asarray(x, dtype=float)))


def jacobi_roots(p, lam):
    """(alpha1, alpha2) with alpha1 + alpha2 = 2b/sigma^2 - 1 and alpha1 alpha2 = 2 lam/sigma^2."""
    S = 2 * p.b / p.sigma ** 2 - 1
    P = 2 * lam / p.sigma ** 2
    disc = S * S - 4 * P
    if disc < 0:
        raise InvalidParameter("Jacobi: complex hypergeometric parameters for this lambda")
    r = math.sqrt(disc)
    return 0.5 * (S - r), 0.5 * (S + r)


def _jacobi(p, lam):
    al, be, A = p.alpha, p.beta, p.A
    if not (al > -1 and be > -1):
        raise Unsupported("Jacobi fundamental pair needs alpha, beta > -1")
    q1, q2 = jacobi_roots(p, lam)
    cp, cm = be + 1, al + 1

    def y(x):
        return np.asarray(x, dtype=float) / A

    return (lambda x: sf.gauss_2f1(q1, q2, cp, y(x)),
            lambda x: sf.gauss_2f1(q1, q2, cm, 1 - y(x)),
            lambda x: q1 * q2 / (cp * A) * sf.gauss_2f1(q1 + 1, q2 + 1, cp + 1, y(x)),
            lambda x: -q1 * q2 / (cm * A) * sf.gauss_2f1(q1 + 1, q2 + 1, cm + 1, 1 - y(x)))


def _scale_pair(p):
    # s~ = k s with k = s~'/s' constant in x
    x0 = _reference_points(p)[0]
    k = float(matched_scale_density(p, x0) / np.exp(p.log_scale_density(x0)))
    return (lambda x: k * p.scale(x),
            lambda x: np.ones_like(np.asarray(x, dtype=float)),
            lambda x: matched_scale_density(p, x),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)))


def _bessel_zero(p):
    al = p.alpha
    return (lambda x: np.ones_like(np.asarray(x, dtype=float)),
            lambda x: np.asarray(x, dtype=float) ** -al,
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: -al * np.asarray(x, dtype=float) ** (-al - 1))


def _bessel(p, lam):
    al = p.alpha
    c = 2 * math.sqrt(2 * lam) / p.sigma

    def arg(x):
        return c * np.sqrt(np.asarray(x, dtype=float))

    def pw(x):
        return np.asarray(x, dtype=float) ** (-0.5 * al)

    # d/dx x^(-nu/2) Z_nu(c sqrt x) = +-(c / 2) x^(-(nu+1)/2) Z_(nu+1)(c sqrt x)
    return (lambda x: pw(x) * sf.bessel_i(al, arg(x)),
            lambda x: pw(x) * sf.bessel_k(al, arg(x)),
            lambda x: 0.5 * c * pw(x) / np.sqrt(x) * sf.bessel_i(al + 1, arg(x)),
            lambda x: -0.5 * c * pw(x) / np.sqrt(x) * sf.bessel_k(al + 1, arg(x)))


def fundamental_pair(p, lam):
    lam = float(lam)
    if not lam >= 0 or not math.isfinite(lam):
        raise InvalidParameter("lambda must be a finite non-negative number")
    if isinstance(p, pr.Bessel) and lam == 0:
        funcs, limits = _bessel_zero(p), (0.0, math.inf)
    elif lam == 0:
        if isinstance(p, pr.Jacobi):
            _jacobi(p, 0.0)  # same parameter checks
        funcs, limits = _scale_pair(p), (-math.inf, math.inf)
    else:
        builder = {pr.BM: _bm, pr.Bessel: _bessel, pr.OU: _ou, pr.CIR: _cir, pr.Jacobi: _jacobi}.get(type(p))
        if builder is None:
            raise Unsupported(f"no fundamental pair for {p.kind}")
        funcs, limits = builder(p, lam), (0.0, math.inf)
    pair = FundamentalPair(p, lam, *funcs, w=1.0, u_limits=limits)
    pts = _reference_points(p)
    ws = pair.wronskian(pts)
    w0 = float(ws[0])
    if not (w0 > 0 and np.all(np.abs(ws / w0 - 1) < 1e-6)):
        raise NonConvergence(f"Wronskian not constant for {p.kind} at lambda={lam}: {ws}")
    return FundamentalPair(p, lam, *funcs, w=w0, u_limits=limits)


def green_function(p, lam, x0, x1, pair=None):
    """Resolvent kernel with respect to m(dx1)."""
    if not lam > 0:
        raise InvalidParameter("green_function needs lambda > 0")
    pair = pair or fundamental_pair(p, lam)
    x0, x1 = np.asarray(x0, dtype=float), np.asarray(x1, dtype=float)
    p.domain.check(x0, "x0")
    p.domain.check(x1, "x1")
    lo, hi = np.minimum(x0, x1), np.maximum(x0, x1)
    out = pair.phi_plus(lo) * pair.phi_minus(hi) / pair.w
    return float(out) if np.ndim(out) == 0 else out


def hitting_laplace(p, lam, x, z, pair=None):
    """E_x[exp(-lam H_z)] for the first hitting time H_z of level z."""
    if not lam > 0:
        raise InvalidParameter("hitting_laplace needs lambda > 0")
    pair = pair or fundamental_pair(p, lam)
    x, z = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(z, dtype=float))
    p.domain.check(x, "x")
    p.domain.check(z, "z")
    up = x <= z
    out = np.where(up, pair.phi_plus(x) / pair.phi_plus(z), pair.phi_minus(x) / pair.phi_minus(z))
    out = np.where(x == z, 1.0, out)
    return float(out) if np.ndim(out) == 0 else out
