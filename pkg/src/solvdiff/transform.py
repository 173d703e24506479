"""Stochastic transformations {rho, h, Y} of a base process.

``h = c1 phi+ + c2 phi-`` is a rho-excessive function built from the
fundamental pair at lambda = rho, and ``Y = (c3 phi+ + c4 phi-) / h``.
The image ``Y_t = Y(X^h_t)`` is a driftless diffusion whose speed density is
``h^2 m_X / |Y'|`` and whose kernel (with respect to that speed density) is
``exp(-rho t) p_X / (h(x0) h(x1))``.
"""

from dataclasses import dataclass
import math
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import boundary as bd
from . import fundamental as fd
from . import processes as pr
from .errors import (BaseMismatch, HypothesisViolated, InvalidCoefficients, InvalidParameter, NonPositiveH,
                     OutOfDomain, SolvDiffError, Unsupported)

_BISECT_MAX = 200


def validation_grid(p, n=100):
    """Interior sample points used to test h > 0 and monotonicity of Y."""
    d = p.domain
    if d.bounded:
        return d.lo + (d.hi - d.lo) * np.linspace(0.005, 0.995, n)
    if math.isfinite(d.lo):
        top = 30.0 / p.theta if isinstance(p, pr.CIR) else 50.0
        return d.lo + np.geomspace(1e-3, top, n)
    if isinstance(p, pr.OU):
        sd = p.sigma / math.sqrt(2 * p.b)
        return p.mean + sd * np.linspace(-6.0, 6.0, n)
    return np.linspace(-10.0, 10.0, n)


def drift_grid(p, n=3000):
    """Tabulation grid for the X^h drift, geometric towards finite endpoints."""
    d = p.domain
    edge = np.geomspace(1e-10, 1.0, n)
    if d.bounded:
        half = 0.5 * (d.hi - d.lo)
        near = half * edge
        return np.unique(np.concatenate([d.lo + near, d.hi - near]))
    if math.isfinite(d.lo):
        top = max(60.0, 60.0 / p.theta) if isinstance(p, pr.CIR) else 200.0
        return np.unique(np.concatenate([d.lo + edge, np.linspace(d.lo + 1.0, d.lo + top, n)]))
    if isinstance(p, pr.OU):
        sd = p.sigma / math.sqrt(2 * p.b)
        return p.mean + sd * np.linspace(-25.0, 25.0, 2 * n)
    return np.linspace(-40.0, 40.0, 2 * n)


def base_density(p, t, x0, x1, N=250):
    """Kernel of the base process w.r.t. m_X: closed form where known, else the spectral series."""
    try:
        return pr.density_closed(p, t, x0, x1)
    except Unsupported:
        return pr.density_series(p, t, x0, x1, N=N)


def _tabulated(f, grid):
    grid = np.unique(np.asarray(grid, dtype=float))
    with np.errstate(all="ignore"):
        vals = f(grid)
    ok = np.isfinite(vals)
    grid, vals = grid[ok], vals[ok]
    spline = CubicSpline(grid, vals)
    lo, hi = grid[0], grid[-1]

    def g(x):
        x = np.asarray(x, dtype=float)
        out = spline(x)
        outside = (x < lo) | (x > hi)
        if outside.any():
            out = np.where(outside, np.nan, out)
            out[outside] = f(x[outside])
        return out

    return g


@dataclass(frozen=True, eq=False)
class StochasticTransform:
    base: pr.BaseProcess
    rho: float
    c1: float
    c2: float
    c3: float
    c4: float
    pair: fd.FundamentalPair

    @property
    def c(self):
        return (self.c1, self.c2, self.c3, self.c4)

    @property
    def det(self):
        """c2 c3 - c1 c4, the sign of Y'."""
        return self.c2 * self.c3 - self.c1 * self.c4

    @property
    def increasing(self):
        return self.det > 0

    def h(self, x):
        fp = self.pair
        return self.c1 * fp.phi_plus(x) + self.c2 * fp.phi_minus(x)

    def dh(self, x):
        fp = self.pair
        return self.c1 * fp.dphi_plus(x) + self.c2 * fp.dphi_minus(x)

    def y(self, x):
        fp = self.pair
        return (self.c3 * fp.phi_plus(x) + self.c4 * fp.phi_minus(x)) / self.h(x)

    def dy(self, x):
        # the numerator of Y' collapses to det times the Wronskian
        x = np.asarray(x, dtype=float)
        return self.det * self.pair.w * fd.matched_scale_density(self.base, x) / self.h(x) ** 2

    def y_dy(self, x):
        """(Y(x), Y'(x)) sharing one evaluation of the fundamental pair."""
        x = np.asarray(x, dtype=float)
        fp = self.pair
        p, m = fp.phi_plus(x), fp.phi_minus(x)
        hv = self.c1 * p + self.c2 * m
        return (self.c3 * p + self.c4 * m) / hv, self.det * fp.w * fd.matched_scale_density(self.base, x) / hv ** 2

    def log_speed_h(self, x):
        """log m_{X^h} = log(h^2 m_X)."""
        return 2 * np.log(self.h(x)) + self.base.log_speed(x)

    def log_scale_density_h(self, x):
        return self.base.log_scale_density(x) - 2 * np.log(self.h(x))

    def h_spec(self, grid=None):
        """The h-transformed diffusion X^h: drift b + sigma^2 h'/h.

        Because (L - rho) h = 0 there is no interior killing. With ``grid`` the
        drift is a cubic spline through exact values on the grid (exact outside
        it), which makes large path simulations affordable.
        """
        b, s = self.base.drift, self.base.vol

        def drift(x):
            x = np.asarray(x, dtype=float)
            return b(x) + s(x) ** 2 * self.dh(x) / self.h(x)

        if grid is not None:
            drift = _tabulated(drift, grid)
        return pr.DiffusionSpec(drift=drift, vol=s, domain=self.base.domain, name=f"{self.base.kind}^h")

    def target_spec(self):
        """The driftless image process Y on D_y."""
        last = {}

        def vol(y):
            # ODE solvers query nearby points in turn: warm-start scalar inversions
            y = np.asarray(y, dtype=float)
            guess = last.get("x") if y.size == 1 else None
            x = invert_y(self, y, guess=guess)
            if y.size == 1:
                last["x"] = float(np.ravel(x)[0])
            return sigma_y_at_x(self, x)

        return pr.DiffusionSpec(drift=lambda y: np.zeros_like(np.asarray(y, dtype=float)),
                                vol=vol, domain=y_limits(self), name=f"Y[{self.base.kind}]")


def build_transform(base, rho, c1, c2, c3, c4, n_check=100):
    rho = float(rho)
    if not (rho >= 0 and math.isfinite(rho)):
        raise InvalidParameter("rho must be finite and non-negative")
    c1, c2, c3, c4 = (float(v) for v in (c1, c2, c3, c4))
    if c1 < 0 or c2 < 0 or (c1 == 0 and c2 == 0):
        raise InvalidCoefficients("need c1, c2 >= 0, not both zero")
    if c1 * c4 - c2 * c3 == 0:
        raise InvalidCoefficients("c1 c4 - c2 c3 must be non-zero")
    t = StochasticTransform(base, rho, c1, c2, c3, c4, fd.fundamental_pair(base, rho))
    x = validation_grid(base, n_check)
    hv = t.h(x)
    if not np.all(hv > 0):
        bad = x[~(hv > 0)][0]
        raise NonPositiveH(f"h(x) <= 0 at x = {bad:.6g}")
    slope = np.diff(t.y(x))
    if not (np.all(slope > 0) if t.increasing else np.all(slope < 0)):
        raise NonPositiveH("Y is not strictly monotone on the validation grid")
    return t


def from_dict(d):
    c = d["c"]
    if len(c) != 4:
        raise InvalidCoefficients("c must hold four numbers")
    return build_transform(pr.from_dict(d["base"]), d["rho"], *c)


def to_dict(t):
    return {"base": pr.to_dict(t.base), "rho": t.rho, "c": list(t.c)}


# ---------------------------------------------------------------- coordinates

def y_limits(t):
    """Interval swept by Y over the interior of the base domain.

    With r = phi+/phi- running from its lower limit (0, or -inf for a scale
    pair) to +inf, Y = (c3 r + c4)/(c1 r + c2) is a Moebius map of r.
    """
    r_lo, _ = t.pair.u_limits
    c1, c2, c3, c4 = t.c

    def at_inf(sign):
        # limit as r -> sign * inf
        return c3 / c1 if c1 > 0 else math.copysign(math.inf, sign * c3)

    hi_end = at_inf(1.0)
    if r_lo == 0.0:
        lo_end = c4 / c2 if c2 > 0 else math.copysign(math.inf, c4)
    else:
        lo_end = at_inf(-1.0)
    lo, hi = sorted((lo_end, hi_end))
    return pr.Interval(lo, hi)


def domain_y(t):
    """D_y, for bases whose endpoints are both inaccessible (entrance or natural)."""
    for which in ("lo", "hi"):
        cls = bd.table_class(t.base, which)
        if cls not in (bd.BoundaryClass.ENTRANCE, bd.BoundaryClass.NATURAL):
            raise HypothesisViolated(f"{t.base.kind} {which} endpoint is {cls.value}, not inaccessible")
    return y_limits(t)


def map_y(t, x):
    x = np.asarray(x, dtype=float)
    t.base.domain.check(x)
    out = t.y(x)
    return float(out) if out.ndim == 0 else out


def _reference(t):
    return float(validation_grid(t.base, 3)[1])


def _bracket(t, y):
    """Finite x-brackets [a, b] with Y crossing y inside, per element of y.

    Expansion stops at the first candidate where Y overflows; bisection then
    treats that end as lying beyond every target value.
    """
    d = t.base.domain
    ref = _reference(t)
    sgn = 1.0 if t.increasing else -1.0
    a = np.full_like(y, d.lo)
    b = np.full_like(y, d.hi)
    for k in range(1100):
        todo_hi = ~np.isfinite(b)
        todo_lo = ~np.isfinite(a)
        if not (todo_hi.any() or todo_lo.any()):
            break
        step = 2.0 ** k
        if todo_hi.any():
            cand = ref + step if not math.isfinite(d.lo) else (d.lo + (ref - d.lo) * step)
            with np.errstate(all="ignore"):
                yc = float(t.y(np.array([cand]))[0])
            ok = todo_hi & ((sgn * (yc - y) >= 0) | ~np.isfinite(yc))
            b[ok] = cand
        if todo_lo.any():
            cand = ref - step
            with np.errstate(all="ignore"):
                yc = float(t.y(np.array([cand]))[0])
            ok = todo_lo & ((sgn * (y - yc) >= 0) | ~np.isfinite(yc))
            a[ok] = cand
    return a, b


def _newton_from(t, flat, guess, steps=8):
    """Unsafeguarded Newton from a nearby guess; nan where it does not settle inside the domain."""
    d = t.base.domain
    x = np.full_like(flat, guess)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            try:
                yx, dyx = t.y_dy(x)
            except SolvDiffError:
                break
            if np.all(np.abs(yx - flat) <= 2e-16 * np.abs(flat)):
                return x
            x = x - (yx - flat) / dyx
            if not np.all((x > d.lo) & (x < d.hi)):
                break
    return np.full_like(flat, np.nan)


def invert_y(t, y, guess=None):
    """x with Y(x) = y: Newton steps on the monotone map, safeguarded by bisection.

    ``guess`` is an optional nearby solution tried first without a bracket.
    """
    y = np.asarray(y, dtype=float)
    dom = y_limits(t)
    dom.check(y, "y")
    flat = np.ravel(y).astype(float)
    if guess is not None and math.isfinite(guess):
        x = _newton_from(t, flat, guess)
        if np.all(np.isfinite(x)):
            return float(x[0]) if y.ndim == 0 else x.reshape(y.shape)
    a, b = _bracket(t, flat)
    sgn = 1.0 if t.increasing else -1.0
    ref = _reference(t)
    x = 0.5 * (a + b)
    live = np.arange(x.size)
    for _ in range(_BISECT_MAX):
        xa, fa, aa, ba = x[live], flat[live], a[live], b[live]
        with np.errstate(all="ignore"):
            yx, dyx = t.y_dy(xa)
            below = sgn * (yx - fa) < 0
            # where Y overflows, sgn * Y sits at its extreme on that side of ref
            below = np.where(np.isfinite(yx), below, xa < ref)
            aa = np.where(below, xa, aa)
            ba = np.where(below, ba, xa)
            newton = xa - (yx - fa) / dyx
        inside = np.isfinite(newton) & (newton > aa) & (newton < ba)
        nxt = np.where(inside, newton, 0.5 * (aa + ba))
        tiny = 4e-16 * np.maximum(1e-300, np.abs(nxt))
        # a residual at rounding level of y cannot be improved on
        hit = np.abs(yx - fa) <= 2e-16 * np.abs(fa)
        done = hit | (np.abs(nxt - xa) <= tiny) | (ba - aa <= tiny)
        x[live] = np.where(hit, xa, nxt)
        a[live], b[live] = aa, ba
        live = live[~done]
        if live.size == 0:
            break
    return float(x[0]) if y.ndim == 0 else x.reshape(y.shape)


def sigma_y(t, y):
    """sigma_Y(y) = sigma_X(x) |Y'(x)| at x = X(y)."""
    x = invert_y(t, y)
    out = t.base.vol(np.asarray(x)) * np.abs(t.dy(np.asarray(x)))
    return float(out) if np.ndim(out) == 0 else out


def sigma_y_at_x(t, x):
    """sigma_Y(Y(x)), evaluated without inversion."""
    x = np.asarray(x, dtype=float)
    return t.base.vol(x) * np.abs(t.dy(x))


def speed_y(t, y):
    """m_Y(y) = h^2(x) m_X(x) / |Y'(x)| at x = X(y)."""
    x = np.asarray(invert_y(t, y))
    out = np.exp(t.log_speed_h(x)) / np.abs(t.dy(x))
    return float(out) if np.ndim(out) == 0 else out


def density_y(t, time, y0, y1, N=250):
    """Kernel of Y with respect to m_Y(dy1)."""
    if not time > 0:
        raise InvalidParameter("time must be positive")
    x0, x1 = invert_y(t, y0), invert_y(t, y1)
    x0, x1 = np.asarray(x0), np.asarray(x1)
    p = base_density(t.base, time, x0, x1, N=N)
    out = math.exp(-t.rho * time) * p / (t.h(x0) * t.h(x1))
    return float(out) if np.ndim(out) == 0 else out


def density_y_lebesgue(t, time, y0, y1, N=250):
    """Same kernel as a density in dy1: density_y times m_Y(y1)."""
    return density_y(t, time, y0, y1, N=N) * speed_y(t, y1)


def green_y(t, lam, y0, y1):
    """G_Y(lam, y0, y1) = G_X(rho + lam, x0, x1) / (h(x0) h(x1))."""
    if not lam > 0:
        raise InvalidParameter("lambda must be positive")
    x0, x1 = np.asarray(invert_y(t, y0)), np.asarray(invert_y(t, y1))
    g = fd.green_function(t.base, t.rho + lam, x0, x1)
    out = g / (t.h(x0) * t.h(x1))
    return float(out) if np.ndim(out) == 0 else out


def green_y_zero(t, y0, y1):
    """Limit of G_Y as lam -> 0+, finite for rho > 0 (transience)."""
    if not t.rho > 0:
        raise HypothesisViolated("the lam -> 0 limit needs rho > 0")
    x0, x1 = np.asarray(invert_y(t, y0)), np.asarray(invert_y(t, y1))
    out = fd.green_function(t.base, t.rho, x0, x1, pair=t.pair) / (t.h(x0) * t.h(x1))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- inverse and composition

@dataclass(frozen=True, eq=False)
class TransformRecord:
    """A composed or inverted transformation, kept as plain maps.

    ``h`` and ``y`` act on source coordinates; ``source`` and ``target`` are
    the diffusions on either side.
    """
    rho: float
    h: Callable
    y: Callable
    source: object
    target: object

    def density(self, time, x0, x1, p_source):
        """Target kernel from the source kernel p_source(time, x0, x1)."""
        return math.exp(-self.rho * time) * p_source / (self.h(x0) * self.h(x1))


def as_record(t):
    if isinstance(t, TransformRecord):
        return t
    return TransformRecord(t.rho, t.h, t.y, t.base, t)


def inverse_transform(t):
    """{-rho, 1/h(X(y)), X(y)}, mapping Y back to X."""
    if isinstance(t, TransformRecord):
        raise Unsupported("inverse of a composed record is not tracked")
    return TransformRecord(-t.rho, lambda y: 1.0 / t.h(np.asarray(invert_y(t, y))), lambda y: invert_y(t, y),
                           source=t, target=t.base)


def _same_process(a, b, grid):
    if a is b:
        return True
    from . import invariants as inv
    spec_a = a if isinstance(a, pr.DiffusionSpec) else _spec_of(a)
    spec_b = b if isinstance(b, pr.DiffusionSpec) else _spec_of(b)
    if spec_a.domain != spec_b.domain:
        return False
    ia, ib = inv.invariant_I(spec_a, grid), inv.invariant_I(spec_b, grid)
    return bool(np.allclose(ia, ib, rtol=1e-5, atol=1e-7))


def _spec_of(obj):
    if isinstance(obj, StochasticTransform):
        return obj.target_spec()
    return pr.to_spec(obj)


def compose(t1, t2, grid=None):
    """t2 after t1: {rho1 + rho2, h1(x) h2(Y1(x)), Y2(Y1(x))}."""
    r1, r2 = as_record(t1), as_record(t2)
    target1 = r1.target
    if grid is None and not (target1 is r2.source):
        dom = _spec_of(target1).domain if not isinstance(target1, pr.DiffusionSpec) else target1.domain
        lo = dom.lo if math.isfinite(dom.lo) else -5.0
        hi = dom.hi if math.isfinite(dom.hi) else lo + 10.0
        grid = lo + (hi - lo) * np.linspace(0.1, 0.9, 9)
    if not _same_process(target1, r2.source, grid):
        raise BaseMismatch("the second transform does not start from the first one's target")
    return TransformRecord(r1.rho + r2.rho, lambda x: r1.h(x) * r2.h(r1.y(x)), lambda x: r2.y(r1.y(x)),
                           source=r1.source, target=r2.target)


# ---------------------------------------------------------------- long-time law

def y_infinity_law(t, y0):
    """(P(Y_inf = y1), P(Y_inf = y2)) for a bounded D_y = (y1, y2) and a conservative transform."""
    dom = domain_y(t)
    if not dom.bounded:
        raise HypothesisViolated("Y_inf is supported on the boundary only for bounded D_y")
    if not isinstance(t.base, (pr.BM, pr.OU)):
        raise HypothesisViolated("the boundary law needs a conservative transform (BM or OU base)")
    y1, y2 = dom.lo, dom.hi
    if not y1 <= y0 <= y2:
        raise OutOfDomain("y0 outside the closure of D_y")
    p_hi = (y0 - y1) / (y2 - y1)
    return 1.0 - p_hi, p_hi
