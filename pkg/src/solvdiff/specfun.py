"""Special functions: log-gamma, Gauss 2F1, Kummer M, Tricomi U, Bessel I/K,
classical orthogonal polynomials.

Everything is evaluated from series, recurrences and quadrature written here.
Functions accept a float or an array for the argument ``z``/``x`` and return the
same shape; parameters are scalars.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from ._backend import kernels
from .errors import InvalidParameter, NonConvergence, Pole


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-13
    max_terms: int = 10000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParameter("rel_tol must be positive")
        if self.max_terms < 1:
            raise InvalidParameter("max_terms must be at least 1")


DEFAULT = SeriesControl()


@dataclass(frozen=True)
class Hermite:
    pass


@dataclass(frozen=True)
class Laguerre:
    alpha: float = 0.0

    def __post_init__(self):
        if not self.alpha > -1:
            raise InvalidParameter("Laguerre alpha must exceed -1")


@dataclass(frozen=True)
class JacobiPoly:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise InvalidParameter("Jacobi alpha, beta must exceed -1")


def _as_array(z):
    arr = np.asarray(z, dtype=float)
    return np.ascontiguousarray(arr.ravel()), arr.shape, arr.ndim == 0


def _shape_back(out, shape, scalar):
    return float(out[0]) if scalar else out.reshape(shape)


def _is_nonpos_int(c):
    return c <= 0 and c == math.floor(c)


# ---------------------------------------------------------------- log-gamma

_EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.91893853320467274178
# B_2k / (2k (2k-1)) for k = 1..8
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188,
             -691 / 360360, 1 / 156, -3617 / 122400)
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def _zeta_minus_one(k, n_direct=20):
    """zeta(k) - 1 by direct summation plus an Euler-Maclaurin tail."""
    s = math.fsum(n ** -float(k) for n in range(2, n_direct))
    n = float(n_direct)
    tail = n ** (1 - k) / (k - 1) + 0.5 * n ** -k
    rising = float(k)  # (k)_{2j-1}
    fact = 2.0  # (2j)!
    for j, b2j in enumerate(_BERNOULLI, start=1):
        tail += b2j / fact * rising * n ** (-k - 2 * j + 1)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return s + tail


_ZETA1 = tuple(_zeta_minus_one(k) for k in range(2, 64))


def _lgamma_near_one(eps):
    """ln Gamma(2 + eps) - eps (1 - gamma), |eps| <= 0.5 (power series in eps)."""
    acc = 0.0
    p = -eps
    for k, zk in enumerate(_ZETA1, start=2):
        p *= -eps
        term = zk * p / k
        acc += term
        if abs(term) < 1e-18 * max(abs(acc), 1e-300):
            break
    return acc


def _lgamma_pos(x):
    if x < 0.5:
        return _lgamma_pos(1.0 + x) - math.log(x)
    if x <= 1.5:
        eps = x - 1.0
        return -math.log1p(eps) + eps * (1.0 - _EULER_GAMMA) + _lgamma_near_one(eps)
    if x <= 2.5:
        eps = x - 2.0
        return eps * (1.0 - _EULER_GAMMA) + _lgamma_near_one(eps)
    shift = 0.0
    y = x
    if y < 10.0:
        prod = 1.0
        while y < 10.0:
            prod *= y
            y += 1.0
        shift = math.log(prod)
    inv = 1.0 / y
    inv2 = inv * inv
    corr = 0.0
    p = inv
    for c in _STIRLING:
        corr += c * p
        p *= inv2
    return (y - 0.5) * math.log(y) - y + _HALF_LOG_2PI + corr - shift


def log_gamma(x):
    """Return ``(ln|Gamma(x)|, sign)``; raises :class:`Pole` at 0, -1, -2, ..."""
    x = float(x)
    if _is_nonpos_int(x):
        raise Pole(f"Gamma has a pole at {x}")
    if x > 0:
        return _lgamma_pos(x), 1
    # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    s = math.sin(math.pi * (x - 2.0 * math.floor(0.5 * x)))
    lg = math.log(math.pi / abs(s)) - _lgamma_pos(1.0 - x)
    return lg, (1 if s > 0 else -1)


def gamma(x):
    lg, sgn = log_gamma(x)
    return sgn * math.exp(lg)


def rgamma(x):
    """1/Gamma(x), equal to zero at the poles."""
    x = float(x)
    if _is_nonpos_int(x):
        return 0.0
    lg, sgn = log_gamma(x)
    return sgn * math.exp(-lg)


@lru_cache(maxsize=4096)
def _gamma_ratio(num, den):
    """prod Gamma(num_i) / prod Gamma(den_j) with signs, zero if a denominator has a pole."""
    if any(_is_nonpos_int(d) for d in den):
        return 0.0
    lg, sgn = 0.0, 1
    for v in num:
        l, s = log_gamma(v)
        lg += l
        sgn *= s
    for v in den:
        l, s = log_gamma(v)
        lg -= l
        sgn *= s
    return sgn * math.exp(lg)


@lru_cache(maxsize=4096)
def digamma(x):
    """Logarithmic derivative of Gamma for real x (not a pole)."""
    x = float(x)
    if _is_nonpos_int(x):
        raise Pole(f"digamma has a pole at {x}")
    if x < 0.5:
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    p = inv2
    tail = 0.0
    for k, b2k in enumerate(_BERNOULLI, start=1):
        tail += b2k / (2 * k) * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(x, n):
    out = 1.0
    for k in range(int(n)):
        out *= x + k
    return out


# ---------------------------------------------------------------- 2F1

def _check(failed, what):
    if failed:
        raise NonConvergence(f"{what}: series did not converge within max_terms")


def _f21_series(a, b, c, z, ctl):
    # the neglected tail is about term |z| / (1 - |z|); the fixed factor covers |z| up to 0.995
    tol = ctl.rel_tol * 1e-3
    out, failed = kernels.hyp2f1_series_array(a, b, c, z, tol, ctl.max_terms)
    _check(failed, "2F1")
    return out


_F21_SERIES_MAX = 0.9
_F21_LOG_CASE = 1e-9  # |c-a-b - m| below this is treated as the integer case m
_F21_DIRECT_MAX = 0.995


def _f21_log_case(a, b, m, w, ctl):
    """2F1(a, b; a+b+m; 1-w) for integer m >= 0 (logarithmic connection)."""
    c = a + b + m
    lead = 0.0
    if m > 0:
        ga = _gamma_ratio((c,), (a + m, b + m))
        coef = 1.0
        for k in range(m):
            lead = lead + ga * coef * math.factorial(m - k - 1) * (-w) ** k
            coef *= (a + k) * (b + k) / (k + 1)
    g = _gamma_ratio((c,), (a, b))
    if g == 0.0:
        return lead + 0.0 * w
    logw = np.log(w)
    psi = -digamma(1.0) - digamma(m + 1.0) + digamma(a + m) + digamma(b + m)
    coef = 1.0 / math.factorial(m)
    acc = np.zeros_like(w)
    wk = np.ones_like(w)
    for k in range(ctl.max_terms):
        term = coef * wk * (logw + psi)
        acc += term
        if k > 2 and np.all(np.abs(term) <= ctl.rel_tol * np.abs(acc)):
            break
        psi += -1.0 / (k + 1) - 1.0 / (k + m + 1) + 1.0 / (a + k + m) + 1.0 / (b + k + m)
        coef *= (a + m + k) * (b + m + k) / ((k + 1) * (k + m + 1))
        wk = wk * w
    else:
        raise NonConvergence("2F1: logarithmic series did not converge")
    return lead - (-w) ** m * g * acc


def _f21_near_one(a, b, c, z, ctl):
    d = c - a - b
    m = round(d)
    w = np.ascontiguousarray(1.0 - z)
    if abs(d - m) > 0.05:
        g1 = _gamma_ratio((c, d), (c - a, c - b))
        g2 = _gamma_ratio((c, -d), (a, b))
        t1 = g1 * _f21_series(a, b, 1.0 - d, w, ctl) if g1 else 0.0
        t2 = g2 * w ** d * _f21_series(c - a, c - b, 1.0 + d, w, ctl) if g2 else 0.0
        return t1 + t2
    if _is_nonpos_int(a) or _is_nonpos_int(b):
        return _f21_series(a, b, c, np.ascontiguousarray(z), ctl)
    if abs(d - m) <= _F21_LOG_CASE:
        if m >= 0:
            return _f21_log_case(a, b, m, w, ctl)
        # Euler: 2F1(a,b;c;z) = (1-z)^(c-a-b) 2F1(c-a, c-b; c; z)
        return w ** d * _f21_log_case(c - a, c - b, -m, w, ctl)
    out = np.empty_like(z)
    near = z <= _F21_DIRECT_MAX
    if near.any():
        out[near] = _f21_series(a, b, c, np.ascontiguousarray(z[near]), ctl)
    if (~near).any():
        # only reached when c-a-b is within 0.05 of an integer but not on it;
        # the connection formula loses about log10(1/|d-m|) digits here
        wf = np.ascontiguousarray(w[~near])
        g1 = _gamma_ratio((c, d), (c - a, c - b))
        g2 = _gamma_ratio((c, -d), (a, b))
        t1 = g1 * _f21_series(a, b, 1.0 - d, wf, ctl) if g1 else 0.0
        t2 = g2 * wf ** d * _f21_series(c - a, c - b, 1.0 + d, wf, ctl) if g2 else 0.0
        out[~near] = t1 + t2
    return out


def _f21_core(a, b, c, z, ctl):
    out = np.empty_like(z)
    mid = (z >= -0.5) & (z <= _F21_SERIES_MAX)
    neg = z < -0.5
    pos = z > _F21_SERIES_MAX
    if mid.any():
        out[mid] = _f21_series(a, b, c, np.ascontiguousarray(z[mid]), ctl)
    if neg.any():
        zn = z[neg]
        w = np.ascontiguousarray(zn / (zn - 1.0))
        out[neg] = (1.0 - zn) ** (-a) * _f21_series(a, c - b, c, w, ctl)
    if pos.any():
        out[pos] = _f21_near_one(a, b, c, z[pos], ctl)
    return out


def gauss_2f1(a, b, c, z, ctl=DEFAULT):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real -1 < z < 1."""
    if _is_nonpos_int(c):
        raise InvalidParameter("2F1: c must not be a non-positive integer")
    zz, shape, scalar = _as_array(z)
    if np.any(np.abs(zz) >= 1.0) or not np.all(np.isfinite(zz)):
        raise InvalidParameter("2F1: requires |z| < 1")
    return _shape_back(_f21_core(float(a), float(b), float(c), zz, ctl), shape, scalar)


def gauss_2f1_deriv(a, b, c, z, ctl=DEFAULT):
    """d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z)."""
    return a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z, ctl)


# ---------------------------------------------------------------- Kummer M

def kummer_m(a, b, z, ctl=DEFAULT):
    """Confluent hypergeometric function M(a, b, z) = 1F1(a; b; z)."""
    a, b = float(a), float(b)
    if _is_nonpos_int(b):
        raise InvalidParameter("M: b must not be a non-positive integer")
    zz, shape, scalar = _as_array(z)
    out = np.empty_like(zz)
    pos = zz >= 0
    if pos.any():
        v, failed = kernels.hyp1f1_series_array(a, b, np.ascontiguousarray(zz[pos]),
                                                ctl.rel_tol, ctl.max_terms)
        _check(failed, "M")
        out[pos] = v
    if (~pos).any():
        zn = zz[~pos]
        v, failed = kernels.hyp1f1_series_array(b - a, b, np.ascontiguousarray(-zn),
                                                ctl.rel_tol, ctl.max_terms)
        _check(failed, "M")
        out[~pos] = np.exp(zn) * v
    return _shape_back(out, shape, scalar)


def kummer_m_deriv(a, b, z, ctl=DEFAULT):
    """dM/dz = (a/b) M(a+1, b+1, z)."""
    return a / b * kummer_m(a + 1.0, b + 1.0, z, ctl)


# ---------------------------------------------------------------- Tricomi U

_DE_STEP = 1.0 / 32.0
_DE_UPPER = 6.0


def _u_positive_a(a, b, z):
    # U = Gamma(a)^-1 int_0^inf e^(-zt) t^(a-1) (1+t)^(b-a-1) dt, regular at integer b
    u_lo = -math.asinh(2.0 / math.pi * (50.0 / min(a, 1.0) + 30.0 + abs(math.log(z.min()))))
    log_int = kernels.u_integral_log(a, b, z, _DE_STEP, u_lo, _DE_UPPER)
    return np.exp(log_int - log_gamma(a)[0])


def _u_any(a, b, z):
    if a == 0.0:
        return np.ones_like(z)
    if _is_nonpos_int(a):
        n = int(-a)
        out = np.zeros_like(z)
        for k in range(n + 1):
            out += math.comb(n, k) * pochhammer(b + k, n - k) * (-z) ** k
        return (-1.0) ** n * out
    if a > 0:
        return _u_positive_a(a, b, z)
    if 1.0 + a - b > 0:
        return z ** (1.0 - b) * _u_positive_a(1.0 + a - b, 2.0 - b, z)
    if abs(b - round(b)) > 0.05 and z.max() < 1.0:
        # no cancellation between the two M terms this close to the origin
        return (_gamma_ratio((1.0 - b,), (a - b + 1.0,)) * kummer_m(a, b, z)
                + _gamma_ratio((b - 1.0,), (a,)) * z ** (1.0 - b) * kummer_m(a - b + 1.0, 2.0 - b, z))
    # lift a above zero, then run U(a-1) = -(b - 2a - z) U(a) - a (a - b + 1) U(a+1) downwards
    k = math.ceil(-a) + 1
    top = a + k
    u_hi = _u_positive_a(top + 1.0, b, z)
    u = _u_positive_a(top, b, z)
    aa = top
    while aa > a + 0.5:
        u, u_hi = -(b - 2.0 * aa - z) * u - aa * (aa - b + 1.0) * u_hi, u
        aa -= 1.0
    return u


def tricomi_u(a, b, z, ctl=DEFAULT):
    """Tricomi confluent hypergeometric function U(a, b, z) for z > 0.

    For a > 0 this integrates the Laplace-type representation with an exp-sinh
    rule, which is accurate uniformly in z and needs no special case at integer
    b. Other a are mapped there by Kummer's transformation or the recurrence in a.
    ``ctl`` is accepted for signature symmetry; the quadrature has a fixed step.
    """
    a, b = float(a), float(b)
    zz, shape, scalar = _as_array(z)
    if np.any(zz <= 0) or not np.all(np.isfinite(zz)):
        raise InvalidParameter("U: requires z > 0")
    return _shape_back(_u_any(a, b, zz), shape, scalar)


def tricomi_u_deriv(a, b, z, ctl=DEFAULT):
    """dU/dz = -a U(a+1, b+1, z)."""
    if a == 0:
        return 0.0 * np.asarray(z, dtype=float) if np.ndim(z) else 0.0
    return -a * tricomi_u(a + 1.0, b + 1.0, z, ctl)


# ---------------------------------------------------------------- Bessel

_BESSEL_ASYMPTOTIC_MIN = 40.0


def _log_bessel_i_large(nu, z):
    """Hankel's expansion e^z / sqrt(2 pi z) sum (-1)^k a_k(nu) / z^k, stopped at its smallest term."""
    mu = 4.0 * nu * nu
    acc = np.ones_like(z)
    term = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 200):
        term = term * -(mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        mag = np.abs(term)
        active &= mag < prev
        acc = np.where(active, acc + term, acc)
        prev = mag
        if not np.any(active & (mag > 1e-17 * np.abs(acc))):
            break
    return z - 0.5 * np.log(2 * np.pi * z) + np.log(acc)


def log_bessel_i_reg(nu, z, ctl=DEFAULT):
    """ln(Gamma(nu+1) (z/2)^-nu I_nu(z)), which is finite (zero) at z = 0."""
    nu = float(nu)
    if not nu > -1:
        raise InvalidParameter("bessel_i: nu must exceed -1")
    zz, shape, scalar = _as_array(z)
    if np.any(zz < 0):
        raise InvalidParameter("bessel_i: z must be non-negative")
    out = np.empty_like(zz)
    big = zz > max(_BESSEL_ASYMPTOTIC_MIN, nu * nu)
    if big.any():
        zb = zz[big]
        out[big] = _log_bessel_i_large(nu, zb) - nu * np.log(0.5 * zb) + log_gamma(nu + 1.0)[0]
    small = ~big
    if small.any():
        tail, failed = kernels.bessel_i_tail_array(nu, np.ascontiguousarray(zz[small]), ctl.rel_tol, ctl.max_terms)
        _check(failed, "I_nu")
        out[small] = np.log(tail)
    return _shape_back(out, shape, scalar)


def log_bessel_i(nu, z, ctl=DEFAULT):
    """ln I_nu(z) for z > 0, usable far past the overflow of I_nu itself."""
    zz, shape, scalar = _as_array(z)
    if np.any(zz <= 0):
        raise InvalidParameter("log_bessel_i: z must be positive")
    out = float(nu) * np.log(0.5 * zz) - log_gamma(float(nu) + 1.0)[0] + log_bessel_i_reg(nu, zz, ctl)
    return _shape_back(out, shape, scalar)


def bessel_i(nu, z, ctl=DEFAULT):
    """Modified Bessel function of the first kind I_nu(z) for z >= 0.

    Orders in (-1, 0) are accepted too (the CIR kernel with a regular origin
    needs them); there I_nu(0) is infinite.
    """
    nu = float(nu)
    if not nu > -1:
        raise InvalidParameter("bessel_i: nu must exceed -1")
    zz, shape, scalar = _as_array(z)
    if np.any(zz < 0):
        raise InvalidParameter("bessel_i: z must be non-negative")
    out = np.empty_like(zz)
    zero = zz == 0
    out[zero] = 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf)
    nz = ~zero
    if nz.any():
        out[nz] = np.exp(log_bessel_i(nu, zz[nz], ctl))
    return _shape_back(out, shape, scalar)


def bessel_k(nu, z, ctl=DEFAULT):
    """Modified Bessel function of the second kind via K_nu(w) = sqrt(pi) (2w)^nu e^-w U(nu+1/2, 2nu+1, 2w)."""
    nu = abs(float(nu))
    zz, shape, scalar = _as_array(z)
    if np.any(zz <= 0):
        raise InvalidParameter("bessel_k: z must be positive")
    out = math.sqrt(math.pi) * (2.0 * zz) ** nu * np.exp(-zz) * _u_any(nu + 0.5, 2.0 * nu + 1.0, 2.0 * zz)
    return _shape_back(out, shape, scalar)


# ---------------------------------------------------------------- orthogonal polynomials

def orth_poly(family, n, x):
    """Evaluate a Hermite, Laguerre or Jacobi polynomial by forward recurrence."""
    n = int(n)
    if n < 0:
        raise InvalidParameter("polynomial degree must be non-negative")
    xx, shape, scalar = _as_array(x)
    if isinstance(family, Hermite):
        out = kernels.hermite_array(n, xx)
    elif isinstance(family, Laguerre):
        out = kernels.laguerre_array(n, float(family.alpha), xx)
    elif isinstance(family, JacobiPoly):
        if np.any(np.abs(xx) > 1.0 + 1e-12):
            raise InvalidParameter("Jacobi polynomial argument must lie in [-1, 1]")
        out = kernels.jacobi_array(n, float(family.alpha), float(family.beta), xx)
    else:
        raise InvalidParameter(f"unknown polynomial family {family!r}")
    return _shape_back(np.asarray(out), shape, scalar)
