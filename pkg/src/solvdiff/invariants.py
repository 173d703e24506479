"""Bose invariants, Schwarzian derivatives and the R-family generators.

A diffusion with drift b and volatility sigma is fingerprinted by

    I(x) = (sigma sigma'' - sigma'^2 / 2 + 2 (2 b sigma'/sigma - b' - b^2/sigma^2)) / 4

read in the natural coordinate z with dx/dz = sigma(x): J(z) = I(x(z)).
Two diffusions are related by a stochastic transformation with rate rho
exactly when J_B = J_A - rho, up to translating (or reflecting) z.
"""

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline

from . import processes as pr
from . import specfun as sf
from .errors import DegenerateDerivative, InvalidR

_REL_STEP = 1e-4


# ---------------------------------------------------------------- finite differences

def _steps(x, domain=None):
    x = np.asarray(x, dtype=float)
    scale = np.maximum(1.0, np.abs(x))
    if domain is not None:
        room = np.minimum(x - domain.lo, domain.hi - x)
        scale = np.minimum(scale, room)
    return _REL_STEP * scale


def _d1(f, x, h):
    def c(hh):
        return (f(x + hh) - f(x - hh)) / (2 * hh)
    return (4 * c(h / 2) - c(h)) / 3


def _d2(f, x, h, f0=None):
    f0 = f(x) if f0 is None else f0

    def c(hh):
        return (f(x + hh) - 2 * f0 + f(x - hh)) / (hh * hh)
    return (4 * c(h / 2) - c(h)) / 3


def _d3(f, x, h):
    def c(hh):
        return (f(x + 2 * hh) - 2 * f(x + hh) + 2 * f(x - hh) - f(x - 2 * hh)) / (2 * hh ** 3)
    return (4 * c(h / 2) - c(h)) / 3


# ---------------------------------------------------------------- invariants

def bose_I(a_coeff, b_coeff, c_coeff, x, da=None, db=None):
    """Potential of the canonical form of a f'' + b f' + c f = 0.

    ``da`` and ``db`` are the derivatives of a and b; Richardson-extrapolated
    central differences are used when they are not supplied.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a_coeff(x), dtype=float)
    if np.any(a == 0):
        raise ZeroDivisionError("leading coefficient vanishes")
    h = _steps(x)
    da = _d1(a_coeff, x, h) if da is None else np.asarray(da(x), dtype=float)
    db = _d1(b_coeff, x, h) if db is None else np.asarray(db(x), dtype=float)
    b, c = np.asarray(b_coeff(x), dtype=float), np.asarray(c_coeff(x), dtype=float)
    return (2 * b * da - 2 * a * db - b * b + 4 * a * c) / (4 * a * a)


def invariant_I(spec, x):
    """I_X(x) of a diffusion spec, with derivatives by extrapolated differences."""
    x = np.asarray(x, dtype=float)
    h = _steps(x, spec.domain)
    s, b = spec.vol(x), spec.drift(x)
    ds, d2s = _d1(spec.vol, x, h), _d2(spec.vol, x, h, s)
    db = _d1(spec.drift, x, h)
    return 0.25 * (s * d2s - 0.5 * ds * ds + 2 * (2 * b * ds / s - db - b * b / (s * s)))


def default_anchor(domain):
    if domain.bounded:
        return 0.5 * (domain.lo + domain.hi)
    if math.isfinite(domain.lo):
        return domain.lo + 1.0
    if math.isfinite(domain.hi):
        return domain.hi - 1.0
    return 0.0


@dataclass(frozen=True)
class BoseInvariant:
    spec: pr.DiffusionSpec
    anchor: float
    x_of_z: Callable
    z_of_x: Callable
    z_grid: np.ndarray

    def j_of_z(self, z):
        x = self.x_of_z(z)
        out = np.full_like(x, np.nan)
        ok = np.isfinite(x)
        if ok.any():
            out[ok] = invariant_I(self.spec, x[ok])
        return out


def natural_coordinate(spec, anchor=None, z_span=(-4.0, 4.0)):
    """(x_of_z, z_of_x) with dx/dz = sigma(x) and x(0) = anchor.

    x_of_z is the dense output of an adaptive solve; it returns nan where the
    solution has left the domain.
    """
    anchor = default_anchor(spec.domain) if anchor is None else float(anchor)
    dom = spec.domain

    def rhs(_, x):
        # trial stages may overshoot the boundary; the event below stops the solve there
        if not dom.lo < x[0] < dom.hi:
            return np.zeros(1)
        return np.atleast_1d(spec.vol(np.atleast_1d(x)))

    def leaving(_, x):
        return min(x[0] - dom.lo, dom.hi - x[0]) - 1e-9 * max(1.0, abs(x[0]))
    leaving.terminal = True

    pieces = []
    for end in z_span:
        sol = solve_ivp(rhs, (0.0, end), [anchor], method="DOP853", rtol=1e-11, atol=1e-14,
                        dense_output=True, events=leaving)
        pieces.append((sol.t[-1], sol.sol))

    (z_lo, lo_sol), (z_hi, hi_sol) = pieces

    def x_of_z(z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.full(z.shape, np.nan)
        neg = (z < 0) & (z >= z_lo)
        pos = (z >= 0) & (z <= z_hi)
        if neg.any():
            out[neg] = lo_sol(z[neg])[0]
        if pos.any():
            out[pos] = hi_sol(z[pos])[0]
        return out

    def z_of_x(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([quad(lambda u: 1.0 / float(spec.vol(np.array([u]))[0]), anchor, xi,
                              epsabs=0, epsrel=1e-12, limit=200)[0] for xi in x])

    return x_of_z, z_of_x


def bose_invariant(spec, anchor=None, z_grid=None):
    z_grid = np.linspace(-1.0, 1.0, 64) if z_grid is None else np.asarray(z_grid, dtype=float)
    span = (min(0.0, z_grid.min()) - 0.5, max(0.0, z_grid.max()) + 0.5)
    x_of_z, z_of_x = natural_coordinate(spec, anchor, span)
    anchor = default_anchor(spec.domain) if anchor is None else float(anchor)
    return BoseInvariant(spec, anchor, x_of_z, z_of_x, z_grid)


def invariant_J(spec, z, anchor=None):
    """J_X(z) = I_X(x(z)), natural coordinate anchored at ``anchor``."""
    z = np.asarray(z, dtype=float)
    inv = bose_invariant(spec, anchor, np.atleast_1d(z))
    out = inv.j_of_z(np.atleast_1d(z))
    return float(out[0]) if z.ndim == 0 else out.reshape(z.shape)


# ---------------------------------------------------------------- Schwarzian and Liouville

def schwarzian(y_map, x, step=None):
    """{y, x} = y'''/y' - 3/2 (y''/y')^2 by extrapolated central differences."""
    x = np.asarray(x, dtype=float)
    h = _steps(x) * 30 if step is None else np.full_like(x, step)
    d1, d2, d3 = _d1(y_map, x, h), _d2(y_map, x, h), _d3(y_map, x, h)
    if np.any(d1 == 0) or not np.all(np.isfinite(d1)):
        raise DegenerateDerivative("y'(x) vanishes")
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def liouville_potential(J, y_map, x, step=None):
    """Potential after the change of variables y: {y, x}/2 + y'(x)^2 J(y(x))."""
    x = np.asarray(x, dtype=float)
    h = _steps(x) if step is None else np.full_like(x, step)
    d1 = _d1(y_map, x, h)
    if np.any(d1 == 0):
        raise DegenerateDerivative("y'(x) vanishes")
    return 0.5 * schwarzian(y_map, x, step) + d1 ** 2 * J(y_map(x))


# ---------------------------------------------------------------- equivalence

def _golden(f, a, b, tol=1e-9):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def equivalent(spec_a, spec_b, z_grid=None, tol=None, max_shift=10.0, detail=False):
    """rho with J_B(+-z + shift) = J_A(z) - rho on the grid, or None.

    The shift (and orientation) of z_B is searched because the natural
    coordinate is defined only up to translation and reflection.
    """
    z = np.linspace(-1.0, 1.0, 64) if z_grid is None else np.asarray(z_grid, dtype=float)
    ja = bose_invariant(spec_a, z_grid=z).j_of_z(z)
    if not np.all(np.isfinite(ja)):
        raise DegenerateDerivative("J_A not finite on the grid")
    inv_b = bose_invariant(spec_b, z_grid=np.array([z.min() - max_shift, z.max() + max_shift]))

    # the shift search runs on a spline of J_B; the final spread is recomputed exactly
    lo_b, hi_b = z.min() - max_shift, z.max() + max_shift
    zb = np.linspace(lo_b, hi_b, int(math.ceil((hi_b - lo_b) / 0.02)) + 1)
    jb_tab = inv_b.j_of_z(zb)
    ok = np.isfinite(jb_tab)
    if ok.sum() < 8:
        raise DegenerateDerivative("J_B not finite on the search range")
    runs = np.flatnonzero(np.diff(np.concatenate([[0], ok.astype(int), [0]])))
    starts, stops = runs[::2], runs[1::2]
    k = int(np.argmax(stops - starts))
    span = slice(starts[k], stops[k])
    jb_spline = CubicSpline(zb[span], jb_tab[span])
    zb_lo, zb_hi = zb[span][0], zb[span][-1]

    def spread(sign, shift, exact=False):
        arg = sign * z + shift
        if exact:
            jb = inv_b.j_of_z(arg)
        elif arg.min() < zb_lo or arg.max() > zb_hi:
            return math.inf, math.nan
        else:
            jb = jb_spline(arg)
        if not np.all(np.isfinite(jb)):
            return math.inf, math.nan
        d = ja - jb
        mean = float(d.mean())
        return float(np.max(np.abs(d - mean))) / (1 + abs(mean)), mean

    best = (math.inf, math.nan, 1.0, 0.0)
    for sign in (1.0, -1.0):
        scan = np.linspace(-max_shift, max_shift, int(math.ceil(2 * max_shift / 0.05)) + 1)
        vals = [spread(sign, s)[0] for s in scan]
        k = int(np.argmin(vals))
        if not math.isfinite(vals[k]):
            continue
        lo, hi = scan[max(k - 1, 0)], scan[min(k + 1, len(scan) - 1)]
        s_opt = _golden(lambda s: spread(sign, s)[0], lo, hi)
        err, mean = spread(sign, s_opt, exact=True)
        if err < best[0]:
            best = (err, mean, sign, s_opt)
    err, rho, sign, shift = best
    limit = 1e-4 if tol is None else tol
    found = rho if err < limit else None
    if detail:
        return found, {"spread": err, "rho": rho, "orientation": sign, "shift": shift}
    return found


# ---------------------------------------------------------------- R-families

@dataclass(frozen=True)
class RPolynomial:
    r0: float
    r1: float = 0.0
    r2: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.r0 + self.r1 * x + self.r2 * x * x


_A = {"confluent": (lambda x: x, pr.Interval(0.0, math.inf)),
      "hypergeometric": (lambda x: x * (1 - x), pr.Interval(0.0, 1.0))}


def _kind(kind):
    if kind not in _A:
        raise InvalidR(f"kind must be 'confluent' or 'hypergeometric', not {kind!r}")
    return _A[kind]


def check_r(kind, R, n=400):
    """R must keep one sign (positive) on the open interval of the family."""
    _, dom = _kind(kind)
    if dom.bounded:
        x = np.linspace(0, 1, n + 2)[1:-1]
    else:
        x = np.concatenate([np.geomspace(1e-8, 1e8, n), [1e12]])
    vals = R(x)
    # a quadratic is positive on the interval iff it is at the sample points and has no root between them
    roots = np.roots([R.r2, R.r1, R.r0]) if (R.r2 or R.r1) else np.array([])
    inside = [r.real for r in np.atleast_1d(roots) if abs(r.imag) < 1e-14 and dom.lo < r.real < dom.hi]
    if inside or not np.all(vals > 0):
        raise InvalidR("R must be positive on the interval")


def r_family_process(kind, R, a, b):
    """dX = (a + bX) A(X)/R(X) dt + A(X)/sqrt(R(X)) dW."""
    A, dom = _kind(kind)
    check_r(kind, R)
    return pr.DiffusionSpec(drift=lambda x: (a + b * np.asarray(x)) * A(np.asarray(x)) / R(x),
                            vol=lambda x: A(np.asarray(x)) / np.sqrt(R(x)), domain=dom,
                            name=f"{kind} R-process")


def hypergeometric_solutions(kind, params):
    """(F1, F2, W) for the family: Kummer M, U in w x, or 2F1 at x and 1 - x.

    confluent params: (p, q, w) for x f'' + (q - w x) f' - p w f = 0.
    hypergeometric params: (a1, a2, gamma) for the Gauss equation.
    W is the Wronskian up to a constant, exp(-int b/a).
    """
    if kind == "confluent":
        p, q, w = params
        return (lambda x: sf.kummer_m(p, q, w * np.asarray(x, dtype=float)),
                lambda x: sf.tricomi_u(p, q, w * np.asarray(x, dtype=float)),
                lambda x: np.asarray(x, dtype=float) ** -q * np.exp(w * np.asarray(x, dtype=float)))
    if kind == "hypergeometric":
        a1, a2, g = params
        return (lambda x: sf.gauss_2f1(a1, a2, g, np.asarray(x, dtype=float)),
                lambda x: sf.gauss_2f1(a1, a2, a1 + a2 + 1 - g, 1 - np.asarray(x, dtype=float)),
                lambda x: np.asarray(x, dtype=float) ** -g * (1 - np.asarray(x, dtype=float)) ** (g - a1 - a2 - 1))
    _kind(kind)


def r_family_sigma(kind, R, c, params, x, C=1.0):
    """sigma_Y(Y(x)) = C W(x) / (c1 F1 + c2 F2)^2 * A(x) / sqrt(R(x))."""
    A, dom = _kind(kind)
    check_r(kind, R)
    x = np.asarray(x, dtype=float)
    dom.check(x)
    c1, c2 = c[0], c[1]
    F1, F2, W = hypergeometric_solutions(kind, params)
    return C * W(x) / (c1 * F1(x) + c2 * F2(x)) ** 2 * A(x) / np.sqrt(R(x))


def canonical_potential(kind, params):
    """Q/(4 A^2): the Bose invariant of the (scaled confluent) hypergeometric equation."""
    if kind == "confluent":
        p, q, w = params
        return lambda x: (-w * w * x * x + 2 * w * (q - 2 * p) * x + q * (2 - q)) / (4 * x * x)
    if kind == "hypergeometric":
        a1, a2, g = params
        return lambda x: (((1 - (a1 - a2) ** 2) * x * x + (2 * g * (a1 + a2 - 1) - 4 * a1 * a2) * x
                           + g * (2 - g)) / (4 * x * x * (1 - x) ** 2))
    _kind(kind)


def canonical_solutions(kind, params):
    """Two independent solutions F/sqrt(W) of f'' + (Q/(4 A^2)) f = 0."""
    F1, F2, W = hypergeometric_solutions(kind, params)
    return (lambda x: F1(x) / np.sqrt(W(x)), lambda x: F2(x) / np.sqrt(W(x)))
