"""Feller boundary classification.

An endpoint ``l`` is classified by the integrability near ``l`` of

* ``Q(x) = m(x) |s(x) - s(d)|``  (finite: the process can come in from ``l``), and
* ``R(x) = s'(x) |m((x, d))|``    (finite: ``l`` is reachable),

giving regular (both), exit (R only), entrance (Q only) or natural (neither).
The numeric test integrates over dyadic windows shrinking towards the endpoint
and watches the ratio of successive window integrals: a power law ``x^g``
gives the ratio ``2^-(g+1)``, so the ratio sits below 1 exactly when the
integral converges. Ratios settling within 10% of 1 are reported as
inconclusive; the default ``method="auto"`` then uses the closed-form table.
"""

from enum import Enum
import math

import numpy as np
from scipy.integrate import quad

from . import processes as pr
from .errors import InconclusiveIntegrability, InvalidParameter, NonConvergence, Unsupported


class BoundaryClass(str, Enum):
    REGULAR = "regular"
    EXIT = "exit"
    ENTRANCE = "entrance"
    NATURAL = "natural"
    KILLING = "killing"


_WINDOWS = 24
_LOW, _HIGH = 0.9, 1.1
_SETTLED = 0.01
_MAX_STEP = 0.25  # largest change of a log integrand between neighbouring nodes
_MAX_NODES = 1 << 16


def _refine(u0, u1, fns):
    """Grid on [u0, u1] on which every log integrand in ``fns`` moves by at most _MAX_STEP per cell."""
    u = np.linspace(u0, u1, 33)
    while True:
        vals = [f(u) for f in fns]
        with np.errstate(invalid="ignore"):
            jump = np.max([np.nan_to_num(np.abs(np.diff(v)), nan=0.0, posinf=np.inf) for v in vals], axis=0)
        bad = jump > _MAX_STEP
        if not bad.any() or len(u) > _MAX_NODES:
            return u, vals
        u = np.sort(np.concatenate([u, 0.5 * (u[:-1] + u[1:])[bad]]))
        if u1 < u0:
            u = u[::-1]


def _log_cells(lv, u):
    """Log of the cell integrals of exp(lv), taking lv linear across each cell."""
    l0, l1 = lv[:-1], lv[1:]
    du = np.abs(np.diff(u))
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        d = l1 - l0
        small = np.abs(d) < 1e-8
        dd = np.where(small, 1.0, np.abs(d))
        top = np.maximum(l0, l1)
        corr = np.where(small, -0.5 * np.abs(d), np.log(-np.expm1(-dd) / dd))
        out = top + corr + np.log(du)
    return np.where(np.isneginf(top), -np.inf, out)


def _lse(v):
    v = np.asarray(v, dtype=float)
    if v.size == 0 or np.all(np.isneginf(v)):
        return -np.inf
    top = np.max(v)
    return float(top + np.log(np.sum(np.exp(v - top))))


def _verdict(name, log_pieces):
    """True (integrable), False (divergent) or None (undecided) from log window integrals.

    A ratio that has settled inside [0.9, 1.1] means a near-critical exponent,
    which the windows cannot resolve.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.exp(np.diff(log_pieces))
    if len(r) == 0:
        return None
    if not np.isfinite(r[-1]):
        return bool(r[-1] < 1)
    tail = r[-3:]
    if len(tail) < 3:
        return None
    settled = np.ptp(tail) < _SETTLED * tail[-1]
    # decide only once the ratios sit clear of 1 and are not drifting back towards it
    if np.all(tail < _LOW) and (settled or np.all(np.diff(tail) <= 0)):
        return True
    if np.all(tail > _HIGH) and (settled or np.all(np.diff(tail) >= 0)):
        return False
    if _LOW <= tail[-1] <= _HIGH and settled:
        raise InconclusiveIntegrability(f"{name}: window ratio settled at {tail[-1]:.4f}, within 10% of 1")
    return None


def integrability(log_m, log_sp, lo, hi, which, d):
    """Return ``(Q_integrable, R_integrable, ratios)`` at the endpoint ``which``.

    ``log_m`` and ``log_sp`` are vectorized log speed / log scale densities and
    ``d`` an interior reference point. Windows are dyadic in |x - c|, with c the
    endpoint when finite and ``d`` otherwise; integrals are carried in log form
    so that exponentially large factors cancel safely.
    """
    end = lo if which == "lo" else hi
    sign = 1.0 if which == "lo" else -1.0
    if math.isfinite(end):
        centre = end
        u_edge = math.log(0.5 * abs(d - end))
        step = -math.log(2.0)
    else:
        centre, sign = d, -sign
        u_edge = math.log(max(1.0, abs(d)))
        step = math.log(2.0)

    def in_u(f):
        # log of f(x(u)) |dx/du|
        def g(u):
            with np.errstate(all="ignore"):
                return np.asarray(f(centre + sign * np.exp(u)), dtype=float) + u
        return g

    edge0 = centre + sign * math.exp(u_edge)
    log_cum = {}
    for name, f in (("Q", log_sp), ("R", log_m)):
        v = quad(lambda x: math.exp(float(f(x))), min(d, edge0), max(d, edge0), limit=200, epsrel=1e-10)[0]
        log_cum[name] = math.log(v) if v > 0 else -math.inf
    pairs = {"Q": (in_u(log_m), in_u(log_sp)), "R": (in_u(log_sp), in_u(log_m))}
    pieces = {"Q": [], "R": []}
    result = {}
    u0 = u_edge
    for _ in range(_WINDOWS):
        u1 = u0 + step
        for name, (outer, inner) in pairs.items():
            if name in result:
                continue
            try:
                u, (lo_v, li_v) = _refine(u0, u1, (outer, inner))
            except NonConvergence as exc:
                raise InconclusiveIntegrability(f"{name}: densities not computable near the endpoint ({exc})") from exc
            if np.isnan(lo_v).any() or np.isnan(li_v).any():
                raise InconclusiveIntegrability(f"{name}: densities not computable near the endpoint")
            cum = np.logaddexp.accumulate(np.concatenate([[log_cum[name]], _log_cells(li_v, u)]))
            pieces[name].append(_lse(_log_cells(lo_v + cum, u)))
            log_cum[name] = cum[-1]
            v = _verdict(name, np.array(pieces[name]))
            if v is not None:
                result[name] = v
        if len(result) == 2:
            break
        u0 = u1
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = {name: np.exp(np.diff(pieces[name])).tolist() for name in pieces}
    for name in ("Q", "R"):
        if name not in result:
            tail = [round(r, 4) for r in ratios[name][-4:]]
            raise InconclusiveIntegrability(f"{name}: window ratios {tail} undecided")
    return result["Q"], result["R"], ratios


def _from_tests(q_ok, r_ok):
    if q_ok and r_ok:
        return BoundaryClass.REGULAR
    if r_ok:
        return BoundaryClass.EXIT
    if q_ok:
        return BoundaryClass.ENTRANCE
    return BoundaryClass.NATURAL


def reference_point(p):
    d = p.domain
    if d.bounded:
        return 0.5 * (d.lo + d.hi)
    if math.isfinite(d.lo):
        return d.lo + 1.0
    if isinstance(p, pr.OU):
        return p.mean
    return 0.0


def _power_class(expo):
    """Class at 0 of a density pair m ~ x^e, s' ~ x^(-e-1) (CIR/Jacobi/Bessel exponents)."""
    if expo <= -1:
        return BoundaryClass.EXIT
    if expo < 0:
        return BoundaryClass.REGULAR
    return BoundaryClass.ENTRANCE


def table_class(p, which):
    """Closed-form classification for the catalogued processes."""
    _check_which(which)
    if isinstance(p, (pr.BM, pr.OU)):
        return BoundaryClass.NATURAL
    if isinstance(p, (pr.CIR, pr.Bessel)):
        return _power_class(p.alpha) if which == "lo" else BoundaryClass.NATURAL
    if isinstance(p, pr.Jacobi):
        return _power_class(p.beta if which == "lo" else p.alpha)
    raise Unsupported(f"no closed-form boundary table for {type(p).__name__}")


def _check_which(which):
    if which not in ("lo", "hi"):
        raise InvalidParameter("which must be 'lo' or 'hi'")


def classify_endpoint(p, which, method="auto", detail=False):
    """Feller class of the endpoint ``which`` of a base process.

    ``method`` is "numeric", "table", or "auto" (numeric, falling back on the
    table when the window ratios are inconclusive).
    """
    _check_which(which)
    if method == "table":
        cls = table_class(p, which)
        return (cls, {}) if detail else cls
    try:
        q_ok, r_ok, info = integrability(p.log_speed, p.log_scale_density, p.domain.lo, p.domain.hi, which,
                                         reference_point(p))
    except InconclusiveIntegrability:
        if method == "numeric":
            raise
        cls = table_class(p, which)
        return (cls, {"fallback": "table"}) if detail else cls
    cls = _from_tests(q_ok, r_ok)
    return (cls, info) if detail else cls


# ---------------------------------------------------------------- transformed processes

def _lemma_class(t, which):
    base, c1, c2 = t.base, t.c1, t.c2
    if isinstance(base, pr.OU):
        return BoundaryClass.NATURAL
    if isinstance(base, pr.CIR):
        if which == "hi":
            return BoundaryClass.NATURAL if c1 > 0 and c2 > 0 else None
        expo = base.alpha
    elif isinstance(base, pr.Jacobi):
        if not (base.alpha > 0 and base.beta > 0):
            return None
        expo = base.beta if which == "lo" else base.alpha
    else:
        return None
    if not (c1 > 0 and c2 > 0) or not expo > 0:
        return None
    return BoundaryClass.KILLING if expo < 1 else BoundaryClass.EXIT


def _numeric_transformed(t, which):
    base = t.base
    q_ok, r_ok, info = integrability(t.log_speed_h, t.log_scale_density_h, base.domain.lo, base.domain.hi, which,
                                     reference_point(base))
    cls = _from_tests(q_ok, r_ok)
    singular_part = t.c2 if which == "lo" else t.c1
    if cls is BoundaryClass.REGULAR and singular_part > 0:
        cls = BoundaryClass.KILLING
    return cls, info


def classify_transformed(t, which, method="auto", detail=False):
    """Class of an endpoint for the h-transformed process X^h (and hence Y).

    ``method``: "lemma" uses only the closed-form lemmas; "numeric" runs the
    window test on m h^2 and s'/h^2 and raises when it is inconclusive;
    "generic" is the numeric test with the same table fallback as
    :func:`classify_endpoint`, where a natural base endpoint stays natural;
    "auto" tries the lemmas first and then "generic". A regular endpoint
    reached through the singular component of h is reported as killing.
    """
    _check_which(which)
    if method not in ("auto", "lemma", "numeric", "generic"):
        raise InvalidParameter(f"unknown method {method!r}")
    if method in ("auto", "lemma"):
        cls = _lemma_class(t, which)
        if cls is not None:
            return (cls, {"source": "lemma"}) if detail else cls
        if method == "lemma":
            raise Unsupported("outside the parameter ranges of the transformed-boundary lemmas")
    try:
        cls, info = _numeric_transformed(t, which)
        info["source"] = "numeric"
    except InconclusiveIntegrability:
        if method == "numeric":
            raise
        try:
            base_cls = table_class(t.base, which)
        except Unsupported:
            raise InconclusiveIntegrability("numeric test inconclusive and no table for the base") from None
        if base_cls is not BoundaryClass.NATURAL:
            raise
        cls, info = BoundaryClass.NATURAL, {"source": "table"}
    return (cls, info) if detail else cls
