"""Canonical solvable base processes.

Each process knows its coefficients, its speed density ``m`` and scale density
``s'`` (normalized where a closed normalized form exists), its spectrum when it
has a discrete one, and its transition density with respect to ``m(dx1)``.
"""

from dataclasses import dataclass, field
import math
from typing import Callable
import warnings

import numpy as np

from . import specfun as sf
from .errors import InvalidParameter, NoSpectrum, OutOfDomain, TruncationWarning, Unsupported

INF = math.inf


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParameter(f"empty interval ({self.lo}, {self.hi})")

    @property
    def bounded(self):
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    def check(self, x, what="x"):
        if not np.all(self.contains(x)):
            raise OutOfDomain(f"{what} outside the open interval ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class DiffusionSpec:
    """Coefficients of dX = b(X) dt + sigma(X) dW on ``domain``; no interior killing.

    ``drift`` and ``vol`` take and return numpy arrays.
    """
    drift: Callable
    vol: Callable
    domain: Interval
    name: str = field(default="diffusion", compare=False)

    def generator(self, f, x, h=1e-4):
        """Apply b f' + sigma^2 f''/2 with five-point central differences.

        The step is ``h`` relative to max(1, |x|), shrunk near a finite endpoint so
        the stencil stays well inside the domain.
        """
        x = np.asarray(x, dtype=float)
        room = np.minimum(x - self.domain.lo, self.domain.hi - x)
        step = h * np.minimum(np.maximum(1.0, np.abs(x)), 10.0 * room)
        fm2, fm1, f0, fp1, fp2 = (f(x + k * step) for k in (-2, -1, 0, 1, 2))
        d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step)
        d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * step ** 2)
        return self.drift(x) * d1 + 0.5 * self.vol(x) ** 2 * d2


class BaseProcess:
    """Common interface; concrete variants are the frozen dataclasses below."""

    kind = ""
    domain = Interval(-INF, INF)
    spectral = False

    def drift(self, x):
        raise NotImplementedError

    def vol(self, x):
        raise NotImplementedError

    def log_speed(self, x):
        raise NotImplementedError

    def log_scale_density(self, x):
        raise NotImplementedError

    def scale(self, x):
        """An antiderivative of s'; the additive constant is arbitrary but fixed."""
        raise NotImplementedError

    def params(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    # spectral interface
    def eigenvalue(self, n):
        raise NoSpectrum(f"{self.kind} has no discrete spectrum")

    def eigenfunction(self, n, x):
        raise NoSpectrum(f"{self.kind} has no discrete spectrum")

    def log_norm_sq(self, n):
        raise NoSpectrum(f"{self.kind} has no discrete spectrum")

    def norm_sq(self, n):
        return math.exp(self.log_norm_sq(n))

    def density_closed(self, t, x0, x1):
        raise Unsupported(f"no closed-form density for {self.kind}")


def _pos(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class BM(BaseProcess):
    kind = "BM"
    domain = Interval(-INF, INF)

    def drift(self, x):
        return np.zeros_like(_pos(x))

    def vol(self, x):
        return np.ones_like(_pos(x))

    def log_speed(self, x):
        return np.full_like(_pos(x), math.log(2.0))

    def log_scale_density(self, x):
        return np.zeros_like(_pos(x))

    def scale(self, x):
        return _pos(x) * 1.0

    def density_closed(self, t, x0, x1):
        d = _pos(x1) - _pos(x0)
        return np.exp(-d * d / (2 * t)) / math.sqrt(2 * math.pi * t) / 2.0


@dataclass(frozen=True)
class Bessel(BaseProcess):
    """dX = a dt + sigma sqrt(X) dW on (0, inf); requires alpha = 2a/sigma^2 - 1 > 0."""
    a: float
    sigma: float = 1.0
    kind = "Bessel"
    domain = Interval(0.0, INF)

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameter("Bessel: sigma must be positive")
        if not self.alpha > 0:
            raise InvalidParameter("Bessel: alpha = 2a/sigma^2 - 1 must be positive")

    @property
    def alpha(self):
        return 2 * self.a / self.sigma ** 2 - 1

    def drift(self, x):
        return np.full_like(_pos(x), self.a)

    def vol(self, x):
        return self.sigma * np.sqrt(np.maximum(_pos(x), 0.0))

    def log_speed(self, x):
        return math.log(2 / self.sigma ** 2) + self.alpha * np.log(_pos(x))

    def log_scale_density(self, x):
        return -(self.alpha + 1) * np.log(_pos(x))

    def scale(self, x):
        return -_pos(x) ** (-self.alpha) / self.alpha


@dataclass(frozen=True)
class OU(BaseProcess):
    """dX = (a - bX) dt + sigma dW."""
    a: float
    b: float
    sigma: float
    kind = "OU"
    domain = Interval(-INF, INF)
    spectral = True

    def __post_init__(self):
        if not (self.b > 0 and self.sigma > 0):
            raise InvalidParameter("OU: b and sigma must be positive")

    @property
    def kappa(self):
        return self.b / self.sigma ** 2

    @property
    def mean(self):
        return self.a / self.b

    def drift(self, x):
        return self.a - self.b * _pos(x)

    def vol(self, x):
        return np.full_like(_pos(x), self.sigma)

    def log_speed(self, x):
        u = _pos(x) - self.mean
        return -0.5 * math.log(math.pi / self.kappa) - self.kappa * u * u

    def log_scale_density(self, x):
        u = _pos(x) - self.mean
        return self.kappa * u * u

    def scale(self, x):
        # int_0^u exp(kappa v^2) dv = u M(1/2, 3/2, kappa u^2)
        u = _pos(x) - self.mean
        return u * sf.kummer_m(0.5, 1.5, self.kappa * u * u)

    def _arg(self, x):
        return math.sqrt(self.kappa) * (_pos(x) - self.mean)

    def eigenvalue(self, n):
        return -self.b * n

    def eigenfunction(self, n, x):
        return sf.orth_poly(sf.Hermite(), n, self._arg(x))

    def log_norm_sq(self, n):
        return n * math.log(2.0) + math.lgamma(n + 1)

    def density_closed(self, t, x0, x1):
        e = math.exp(-self.b * t)
        var = (1 - e * e) / (2 * self.kappa)
        mu = _pos(x0) * e + self.mean * (1 - e)
        d = _pos(x1) - mu
        log_pm = -d * d / (2 * var) - 0.5 * math.log(2 * math.pi * var)
        return np.exp(log_pm - self.log_speed(x1))


@dataclass(frozen=True)
class CIR(BaseProcess):
    """dX = (a - bX) dt + sigma sqrt(X) dW on [0, inf)."""
    a: float
    b: float
    sigma: float
    kind = "CIR"
    domain = Interval(0.0, INF)
    spectral = True

    def __post_init__(self):
        if not (self.b > 0 and self.sigma > 0):
            raise InvalidParameter("CIR: b and sigma must be positive")

    @property
    def alpha(self):
        return 2 * self.a / self.sigma ** 2 - 1

    @property
    def theta(self):
        return 2 * self.b / self.sigma ** 2

    def drift(self, x):
        return self.a - self.b * _pos(x)

    def vol(self, x):
        return self.sigma * np.sqrt(np.maximum(_pos(x), 0.0))

    def log_speed(self, x):
        x = _pos(x)
        al, th = self.alpha, self.theta
        if al > -1:
            const = (al + 1) * math.log(th) - sf.log_gamma(al + 1)[0]
        else:  # not normalizable; fall back to 2 sigma^-2 e^B
            const = math.log(2 / self.sigma ** 2)
        return const + al * np.log(x) - th * x

    def log_scale_density(self, x):
        x = _pos(x)
        return -(self.alpha + 1) * np.log(x) + self.theta * x

    def scale(self, x):
        # x^c/c M(c, c+1, theta x) with c = -alpha differentiates to x^(c-1) e^(theta x)
        c = -self.alpha
        x = _pos(x)
        if abs(c - round(c)) < 1e-8 and c < 0.5:
            # x^c/c blows up as c -> 0 and M(c, c+1, .) is undefined at negative integers
            return _integrate_from(lambda t: np.exp(self.log_scale_density(t)), 1.0, x)
        return x ** c / c * sf.kummer_m(c, c + 1, self.theta * x)

    def eigenvalue(self, n):
        return -self.b * n

    def eigenfunction(self, n, x):
        return sf.orth_poly(sf.Laguerre(self.alpha), n, self.theta * _pos(x))

    def log_norm_sq(self, n):
        al = self.alpha
        return sf.log_gamma(al + 1 + n)[0] - sf.log_gamma(al + 1)[0] - math.lgamma(n + 1)

    def density_closed(self, t, x0, x1):
        x0, x1 = _pos(x0), _pos(x1)
        if np.any(x0 <= 0):
            raise OutOfDomain("CIR closed form needs x0 > 0")
        al = self.alpha
        if not al > -1:
            raise Unsupported("CIR closed form needs alpha > -1")
        e = math.exp(-self.b * t)
        ct = self.theta / (1 - e)
        z = 2 * ct * np.sqrt(x0 * x1 * e)
        # (x1 / (x0 e))^(alpha/2) I_alpha(z) = (ct x1)^alpha I_reg(z) / Gamma(alpha+1), finite as e -> 0
        log_pm = (math.log(ct) + al * np.log(ct * x1) - ct * (x0 * e + x1)
                  - sf.log_gamma(al + 1)[0] + sf.log_bessel_i_reg(al, z))
        return np.exp(log_pm - self.log_speed(x1))


@dataclass(frozen=True)
class Jacobi(BaseProcess):
    """dX = (a - bX) dt + sigma sqrt(X (A - X)) dW on [0, A]."""
    a: float
    b: float
    sigma: float
    A: float = 1.0
    kind = "Jacobi"
    spectral = True

    def __post_init__(self):
        if not (self.sigma > 0 and self.A > 0):
            raise InvalidParameter("Jacobi: sigma and A must be positive")

    @property
    def domain(self):
        return Interval(0.0, self.A)

    @property
    def alpha(self):
        return 2 * self.b / self.sigma ** 2 - 2 * self.a / (self.sigma ** 2 * self.A) - 1

    @property
    def beta(self):
        return 2 * self.a / (self.sigma ** 2 * self.A) - 1

    def drift(self, x):
        return self.a - self.b * _pos(x)

    def vol(self, x):
        x = _pos(x)
        return self.sigma * np.sqrt(np.clip(x * (self.A - x), 0.0, None))

    def log_speed(self, x):
        x = _pos(x)
        al, be, A = self.alpha, self.beta, self.A
        if al > -1 and be > -1:
            log_beta_fn = sf.log_gamma(al + 1)[0] + sf.log_gamma(be + 1)[0] - sf.log_gamma(al + be + 2)[0]
            const = -(al + be + 1) * math.log(A) - log_beta_fn
        else:
            const = math.log(2 / (self.sigma ** 2 * A))
        return const + be * np.log(x) + al * np.log(A - x)

    def log_scale_density(self, x):
        x = _pos(x)
        return -(self.beta + 1) * np.log(x) - (self.alpha + 1) * np.log(self.A - x)

    def scale(self, x):
        x = _pos(x)
        c = -self.beta
        A = self.A
        y = x / A
        if (c != 0 and not (c < 0 and c == math.floor(c))) and np.all(y <= 0.9):
            # int t^(c-1) (A-t)^(-alpha-1) dt = A^(-alpha-1) x^c/c 2F1(alpha+1, c; c+1; x/A)
            return A ** (-self.alpha - 1) * x ** c / c * sf.gauss_2f1(self.alpha + 1, c, c + 1, y)
        return _integrate_from(lambda t: np.exp(self.log_scale_density(t)), 0.5 * A, x)

    def eigenvalue(self, n):
        return -0.5 * self.sigma ** 2 * n * (n - 1 + 2 * self.b / self.sigma ** 2)

    def eigenfunction(self, n, x):
        y = np.clip(2 * _pos(x) / self.A - 1, -1.0, 1.0)
        return sf.orth_poly(sf.JacobiPoly(self.alpha, self.beta), n, y)

    def log_norm_sq(self, n):
        if n == 0:
            return 0.0
        al, be = self.alpha, self.beta
        lg = (sf.log_gamma(n + al + 1)[0] + sf.log_gamma(n + be + 1)[0] + sf.log_gamma(al + be + 2)[0]
              - math.log(2 * n + al + be + 1) - sf.log_gamma(n + 1)[0] - sf.log_gamma(n + al + be + 1)[0]
              - sf.log_gamma(al + 1)[0] - sf.log_gamma(be + 1)[0])
        return lg


def _integrate_from(f, start, x):
    from scipy.integrate import quad
    x = np.asarray(x, dtype=float)
    out = np.array([quad(f, start, xi, limit=200, epsabs=0, epsrel=1e-12)[0] for xi in x.ravel()])
    return out.reshape(x.shape) if x.ndim else float(out[0])


KINDS = {"BM": BM, "Bessel": Bessel, "OU": OU, "CIR": CIR, "Jacobi": Jacobi}


# ---------------------------------------------------------------- functional API

def to_spec(p: BaseProcess) -> DiffusionSpec:
    return DiffusionSpec(drift=p.drift, vol=p.vol, domain=p.domain, name=p.kind)


def speed_density(p, x):
    p.domain.check(x)
    return np.exp(p.log_speed(x))


def scale_density(p, x):
    p.domain.check(x)
    return np.exp(p.log_scale_density(x))


def eigenvalue(p, n):
    return p.eigenvalue(int(n))


def eigenfunction(p, n, x):
    return p.eigenfunction(int(n), x)


def norm_sq(p, n):
    return p.norm_sq(int(n))


def density_series(p, t, x0, x1, N=80, rel_tol=1e-10, return_last=False):
    """Spectral expansion of the kernel with respect to m(dx1), truncated after N."""
    if not p.spectral:
        raise NoSpectrum(f"{p.kind} has no discrete spectrum")
    if not t > 0:
        raise InvalidParameter("t must be positive")
    total = 0.0
    term = 0.0
    for n in range(N + 1):
        scale = math.exp(-0.5 * p.log_norm_sq(n))
        term = math.exp(p.eigenvalue(n) * t) * (scale * p.eigenfunction(n, x0)) * (scale * p.eigenfunction(n, x1))
        total = total + term
    last = np.max(np.abs(term))
    if last > rel_tol * np.min(np.abs(total)):
        warnings.warn(f"spectral series truncated at N={N}; last term {last:.3g}", TruncationWarning,
                      stacklevel=2)
    return (total, last) if return_last else total


def density_closed(p, t, x0, x1):
    if not t > 0:
        raise InvalidParameter("t must be positive")
    return p.density_closed(t, x0, x1)


def from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    if kind not in KINDS:
        raise InvalidParameter(f"unknown process kind {kind!r}")
    return KINDS[kind](**d)


def to_dict(p):
    out = {"kind": p.kind}
    out.update(p.params())
    return out
