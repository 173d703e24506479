import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from solvdiff import processes as pr
from solvdiff.errors import InvalidParameter, NoSpectrum, OutOfDomain, TruncationWarning, Unsupported

SPECTRAL = [
    pr.OU(0.0, 1.0, 1.0),
    pr.OU(0.5, 2.0, 0.7),
    pr.CIR(1.0, 1.0, math.sqrt(2.0)),
    pr.CIR(0.8, 0.6, 1.1),
    pr.CIR(0.2, 1.0, 1.0),  # alpha = -0.6, regular origin
    pr.Jacobi(1.0, 2.0, 1.0, 2.0),
    pr.Jacobi(0.3, 1.5, 1.1, 1.0),
    pr.Jacobi(0.9, 2.5, 1.2, 1.5),
]
ALL = SPECTRAL + [pr.BM(), pr.Bessel(1.5), pr.Bessel(2.0, 1.3)]


def interior_points(p, k=7):
    d = p.domain
    if d.bounded:
        return d.lo + (d.hi - d.lo) * np.linspace(0.08, 0.92, k)
    if math.isfinite(d.lo):
        return d.lo + np.linspace(0.15, 4.0, k)
    return np.linspace(-2.0, 2.0, k)


def integrate_m(p, f):
    d = p.domain
    if isinstance(p, pr.OU):
        half = 10 * p.sigma / math.sqrt(p.b)
        lo, hi = p.mean - half, p.mean + half
        return quad(f, lo, hi, limit=400, epsabs=1e-12, epsrel=1e-12)[0]
    lo = d.lo + 1e-12
    hi = d.hi - 1e-12 if d.bounded else math.inf
    mid = 0.5 * (lo + hi) if d.bounded else 1.0
    return sum(quad(f, x, y, limit=400, epsabs=1e-12, epsrel=1e-12)[0] for x, y in ((lo, mid), (mid, hi)))


# ------------------------------------------------------------------ worked values

def test_ou_spec():
    s = pr.to_spec(pr.OU(0.0, 1.0, 1.0))
    x = np.array([-1.0, 0.5, 2.0])
    assert np.allclose(s.drift(x), -x)
    assert np.allclose(s.vol(x), 1.0)
    assert s.domain == pr.Interval(-math.inf, math.inf)


def test_cir_exponents():
    p = pr.CIR(1.0, 1.0, math.sqrt(2.0))
    assert p.alpha == pytest.approx(0.0, abs=1e-15)
    assert p.theta == pytest.approx(1.0)


def test_jacobi_exponents():
    p = pr.Jacobi(1.0, 2.0, 1.0, 2.0)
    assert p.beta == pytest.approx(0.0)
    assert p.alpha == pytest.approx(2.0)
    assert pr.to_spec(p).domain == pr.Interval(0.0, 2.0)


def test_domains():
    assert pr.to_spec(pr.CIR(1, 1, 1)).domain == pr.Interval(0.0, math.inf)
    assert pr.to_spec(pr.Bessel(1.5)).domain == pr.Interval(0.0, math.inf)


def test_speed_values():
    assert pr.speed_density(pr.OU(0.0, 1.0, 1.0), 0.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-12)
    assert pr.speed_density(pr.CIR(1.0, 1.0, math.sqrt(2.0)), 1.0) == pytest.approx(math.exp(-1), rel=1e-12)
    assert pr.speed_density(pr.BM(), 0.3) == 2.0
    assert pr.scale_density(pr.BM(), 0.3) == 1.0


def test_bessel_speed_scale():
    p = pr.Bessel(1.5, 1.0)  # alpha = 2
    x = 1.7
    assert pr.speed_density(p, x) == pytest.approx(2 * x ** 2, rel=1e-12)
    assert pr.scale_density(p, x) == pytest.approx(x ** -3, rel=1e-12)


@pytest.mark.parametrize("p", [p for p in SPECTRAL])
def test_speed_normalized(p):
    assert integrate_m(p, lambda x: float(pr.speed_density(p, x))) == pytest.approx(1.0, abs=1e-8)


def test_eigenvalues():
    assert pr.eigenvalue(pr.OU(0.0, 1.0, 1.0), 0) == 0
    assert pr.eigenvalue(pr.CIR(1.0, 2.0, 1.0), 3) == -6
    assert pr.eigenvalue(pr.Jacobi(0.3, 1.0, 1.0), 1) == pytest.approx(-1.0)


def test_eigenfunction_values():
    ou = pr.OU(0.0, 1.0, 1.0)
    assert pr.eigenfunction(ou, 2, 1.0) == pytest.approx(2.0)
    assert pr.norm_sq(pr.CIR(1.0, 1.0, math.sqrt(2.0)), 4) == pytest.approx(1.0)
    for p in SPECTRAL:
        assert pr.eigenfunction(p, 0, interior_points(p)) == pytest.approx(1.0)
        assert pr.norm_sq(p, 0) == 1.0


@pytest.mark.parametrize("p", [pr.BM(), pr.Bessel(1.5)])
def test_no_spectrum(p):
    with pytest.raises(NoSpectrum):
        pr.eigenvalue(p, 1)
    with pytest.raises(NoSpectrum):
        pr.eigenfunction(p, 1, 1.0)
    with pytest.raises(NoSpectrum):
        pr.density_series(p, 1.0, 1.0, 1.0)


def test_jacobi_closed_form_unsupported():
    with pytest.raises(Unsupported):
        pr.density_closed(pr.Jacobi(1.0, 2.0, 1.0, 2.0), 1.0, 0.5, 0.7)


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        pr.speed_density(pr.CIR(1, 1, 1), -0.5)
    with pytest.raises(OutOfDomain):
        pr.scale_density(pr.Jacobi(1.0, 2.0, 1.0, 2.0), 2.0)


def test_invalid_parameters():
    with pytest.raises(InvalidParameter):
        pr.OU(0.0, -1.0, 1.0)
    with pytest.raises(InvalidParameter):
        pr.CIR(1.0, 1.0, 0.0)
    with pytest.raises(InvalidParameter):
        pr.Bessel(0.4, 1.0)  # alpha <= 0
    with pytest.raises(InvalidParameter):
        pr.Interval(1.0, 1.0)


def test_roundtrip_dict():
    for p in ALL:
        assert pr.from_dict(pr.to_dict(p)) == p
    with pytest.raises(InvalidParameter):
        pr.from_dict({"kind": "Heston"})


# ------------------------------------------------------------------ properties

@pytest.mark.parametrize("p", SPECTRAL, ids=lambda p: repr(p))
def test_orthogonality(p):
    n_max = 10
    for n in range(n_max + 1):
        for k in range(n, n_max + 1):
            val = integrate_m(p, lambda x: float(p.eigenfunction(n, x) * p.eigenfunction(k, x)
                                                 * np.exp(p.log_speed(x))))
            # normalized so the tolerance stays above double rounding when norm_sq(10) ~ 4e9
            scaled = val / math.sqrt(p.norm_sq(n) * p.norm_sq(k))
            assert abs(scaled - (n == k)) < 1e-6, (n, k, val)


def _kernel_grid(p):
    if isinstance(p, pr.OU):
        return p.mean + np.linspace(-1.5, 1.5, 5) * p.sigma / math.sqrt(p.b)
    return np.linspace(0.3, 2.5, 5) * (p.alpha + 1) / p.theta


@pytest.mark.parametrize("p", [pr.OU(0.0, 1.0, 1.0), pr.OU(0.5, 2.0, 0.7), pr.CIR(1.0, 1.0, math.sqrt(2.0)),
                               pr.CIR(0.8, 0.6, 1.1), pr.CIR(0.2, 1.0, 1.0)], ids=repr)
@pytest.mark.parametrize("t", [0.25, 1.0, 4.0])
def test_series_matches_closed(p, t):
    g = _kernel_grid(p)
    x0, x1 = np.meshgrid(g, g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        series = pr.density_series(p, t, x0, x1, N=80)
    closed = pr.density_closed(p, t, x0, x1)
    assert np.max(np.abs(series / closed - 1)) < 1e-6


def test_cir_worked_series():
    p = pr.CIR(1.0, 1.0, math.sqrt(2.0))
    assert pr.density_series(p, 0.5, 1.0, 1.0, N=60) == pytest.approx(pr.density_closed(p, 0.5, 1.0, 1.0), rel=1e-8)


@pytest.mark.parametrize("p", SPECTRAL, ids=repr)
def test_series_symmetric_and_long_time(p):
    x = interior_points(p, 4)
    a = pr.density_series(p, 0.7, x[0], x[-1])
    b = pr.density_series(p, 0.7, x[-1], x[0])
    assert a == pytest.approx(b, rel=1e-12)
    assert pr.density_series(p, 60.0, x[1], x[2]) == pytest.approx(1.0, abs=1e-9)


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        pr.density_series(pr.OU(0.0, 1.0, 1.0), 0.01, 0.0, 0.1, N=10)


def test_ou_closed_mass_and_moments():
    p = pr.OU(0.0, 1.0, 1.0)
    pm = lambda x1: float(pr.density_closed(p, 1.0, 0.0, x1) * pr.speed_density(p, x1))
    assert quad(pm, -np.inf, np.inf)[0] == pytest.approx(1.0, abs=1e-10)
    var = quad(lambda x: x * x * pm(x), -np.inf, np.inf)[0]
    assert var == pytest.approx((1 - math.exp(-2)) / 2, rel=1e-9)
    assert quad(lambda x: x * pm(x), -np.inf, np.inf)[0] == pytest.approx(0.0, abs=1e-12)


def test_cir_chapman_kolmogorov():
    p = pr.CIR(0.8, 0.6, 1.1)
    s, t, x0, x1 = 0.4, 0.7, 0.9, 1.6
    f = lambda z: float(pr.density_closed(p, s, x0, z) * pr.density_closed(p, t, z, x1) * pr.speed_density(p, z))
    lhs = quad(f, 0, 1.0, limit=200)[0] + quad(f, 1.0, np.inf, limit=200)[0]
    assert lhs == pytest.approx(float(pr.density_closed(p, s + t, x0, x1)), rel=1e-6)


def test_bm_closed():
    assert pr.density_closed(pr.BM(), 1.0, 0.0, 0.0) == pytest.approx(0.5 / math.sqrt(2 * math.pi))


@pytest.mark.parametrize("p", SPECTRAL, ids=repr)
def test_generator_residual(p):
    spec = pr.to_spec(p)
    x = interior_points(p)
    for n in range(0, 8):
        lhs = spec.generator(lambda y: p.eigenfunction(n, y), x)
        rhs = p.eigenvalue(n) * p.eigenfunction(n, x)
        assert np.all(np.abs(lhs - rhs) < 1e-5 * np.maximum(1.0, np.abs(rhs))), n


@pytest.mark.parametrize("p", ALL, ids=repr)
def test_speed_scale_product_constant(p):
    x = interior_points(p)
    prod = np.exp(p.log_speed(x) + p.log_scale_density(x)) * p.vol(x) ** 2 / 2
    assert np.ptp(prod) < 1e-12 * np.max(prod)


@pytest.mark.parametrize("p", ALL, ids=repr)
def test_scale_is_antiderivative(p):
    x = interior_points(p)
    h = 1e-5
    ds = (p.scale(x + h) - p.scale(x - h)) / (2 * h)
    assert np.allclose(ds, np.exp(p.log_scale_density(x)), rtol=1e-6)


@pytest.mark.parametrize("p", [pr.BM(), pr.Bessel(1.5)], ids=repr)
def test_normalization_unity_for_general_formula(p):
    x = interior_points(p)
    prod = np.exp(p.log_speed(x) + p.log_scale_density(x)) * p.vol(x) ** 2 / 2
    assert np.allclose(prod, 1.0)
