import math

import numpy as np
import pytest

from solvdiff import invariants as iv
from solvdiff import processes as pr
from solvdiff import transform as tr
from solvdiff.errors import DegenerateDerivative, InvalidR


def driftless(vol, domain):
    return pr.DiffusionSpec(drift=lambda x: np.zeros_like(np.asarray(x, dtype=float)), vol=vol, domain=domain)


def logistic_vol():
    # sigma = x (1 - x) on (0, 1): I = -1/8 everywhere
    return driftless(lambda x: np.asarray(x) * (1 - np.asarray(x)), pr.Interval(0.0, 1.0))


def cev(theta):
    return driftless(lambda x: np.asarray(x, dtype=float) ** theta, pr.Interval(0.0, math.inf))


def cir(alpha, b=1.0, sigma=1.0):
    return pr.CIR((alpha + 1) * sigma ** 2 / 2, b, sigma)


def jacobi(alpha, beta, sigma=1.0, A=1.0):
    return pr.Jacobi((beta + 1) * sigma ** 2 * A / 2, (alpha + beta + 2) * sigma ** 2 / 2, sigma, A)


Z = np.linspace(-1.0, 1.0, 17)


# ---------------------------------------------------------------- bose_I

def test_bose_trivial():
    one, zero = (lambda x: np.ones_like(x)), (lambda x: np.zeros_like(x))
    assert np.all(iv.bose_I(one, zero, zero, np.linspace(-2, 2, 9)) == 0)


def test_bose_canonical_form_is_idempotent():
    J = lambda x: np.sin(x) + x ** 2
    x = np.linspace(-1, 2, 11)
    got = iv.bose_I(lambda u: np.ones_like(u), lambda u: np.zeros_like(u), J, x)
    np.testing.assert_allclose(got, J(x), rtol=1e-12)


@pytest.mark.parametrize("a1,a2,g", [(0.4, 1.3, 1.2), (-0.7, 2.1, 0.6)])
def test_bose_hypergeometric(a1, a2, g):
    x = np.linspace(0.05, 0.95, 13)
    got = iv.bose_I(lambda u: u * (1 - u), lambda u: g - (a1 + a2 + 1) * u, lambda u: -a1 * a2 + 0 * u, x)
    Q = (1 - (a1 - a2) ** 2) * x ** 2 + (2 * g * (a1 + a2 - 1) - 4 * a1 * a2) * x + g * (2 - g)
    np.testing.assert_allclose(got, Q / (4 * x ** 2 * (1 - x) ** 2), rtol=1e-8)


@pytest.mark.parametrize("a,b,w", [(0.3, 1.4, 1.0), (1.5, 0.5, 2.5)])
def test_bose_kummer(a, b, w):
    # x f'' + (b - w x) f' - a w f = 0, solved by M(a, b, w x)
    x = np.linspace(0.1, 6.0, 13)
    got = iv.bose_I(lambda u: u, lambda u: b - w * u, lambda u: -a * w + 0 * u, x)
    want = (-w ** 2 * x ** 2 + 2 * w * (b - 2 * a) * x + b * (2 - b)) / (4 * x ** 2)
    np.testing.assert_allclose(got, want, rtol=1e-8)
    np.testing.assert_allclose(iv.canonical_potential("confluent", (a, b, w))(x), want, rtol=1e-14)


def test_bose_zero_leading_coefficient():
    with pytest.raises(ZeroDivisionError):
        iv.bose_I(lambda u: u, lambda u: u, lambda u: u, np.array([0.0, 1.0]))


# ---------------------------------------------------------------- J

def test_j_bm_vanishes():
    np.testing.assert_allclose(iv.invariant_J(pr.to_spec(pr.BM()), Z), 0.0, atol=1e-7)


def test_j_quadratic_vol_constant():
    np.testing.assert_allclose(iv.invariant_J(logistic_vol(), Z), -0.125, atol=1e-7)


@pytest.mark.parametrize("a", [0.75, 1.5, 3.0])
def test_j_bessel(a):
    # anchor x(0) = 1 puts the origin of z = 2 sqrt(x) at z = -2
    j = iv.invariant_J(pr.to_spec(pr.Bessel(a)), Z)
    want = (Z + 2) ** -2 * (-2 * a * a + 2 * a - 3 / 8)
    np.testing.assert_allclose(j, want, rtol=1e-5, atol=1e-7)


def test_natural_coordinate_round_trip():
    spec = pr.to_spec(cir(0.5))
    x_of_z, z_of_x = iv.natural_coordinate(spec, z_span=(-1.5, 1.5))
    x = x_of_z(Z)
    np.testing.assert_allclose(x_of_z(z_of_x(x)), x, rtol=0, atol=1e-9)
    np.testing.assert_allclose(z_of_x(x), Z, atol=1e-9)


def test_natural_coordinate_nan_outside_solution():
    # x = (z/2 + 1)^2 reaches 0 at z = -2
    x_of_z, _ = iv.natural_coordinate(pr.to_spec(pr.Bessel(1.5)), z_span=(-3.0, 1.0))
    assert np.isnan(x_of_z(np.array([-2.5]))[0])
    assert x_of_z(np.array([0.0]))[0] == pytest.approx(1.0)


# ---------------------------------------------------------------- Schwarzian and Liouville

def test_schwarzian_examples():
    x = np.linspace(-2.0, 5.0, 8)
    np.testing.assert_allclose(iv.schwarzian(lambda u: u, x), 0.0, atol=1e-6)
    np.testing.assert_allclose(iv.schwarzian(lambda u: (2 * u + 1) / (u + 3), x), 0.0, atol=1e-5)
    assert iv.schwarzian(np.tan, np.array([0.3]))[0] == pytest.approx(2.0, abs=1e-5)


def test_schwarzian_degenerate():
    with pytest.raises(DegenerateDerivative):
        iv.schwarzian(lambda u: np.ones_like(u), np.array([0.5]))


def test_liouville_examples():
    x = np.linspace(-0.5, 0.5, 7)
    J = lambda y: np.cos(y)
    np.testing.assert_allclose(iv.liouville_potential(J, lambda u: u, x), J(x), atol=1e-6)
    np.testing.assert_allclose(iv.liouville_potential(lambda y: 0 * y, np.tan, x), 1.0, atol=1e-5)


@pytest.mark.parametrize("y_map", [lambda u: (2 * u + 1) / (u + 3), lambda u: np.exp(0.7 * u), np.sinh])
def test_liouville_matches_operator(y_map):
    # f(y) with f_yy + J(y) f = 0 written in x: a f'' + b f' + c f = 0, a = 1/y'^2, b = -y''/y'^3
    J = lambda y: 0.3 + np.sin(y)
    x = np.linspace(0.2, 1.2, 9)
    h = 1e-3
    d1 = lambda u: (y_map(u + h) - y_map(u - h)) / (2 * h)
    d1 = lambda u, d1=d1: (4 * ((y_map(u + h / 2) - y_map(u - h / 2)) / h) - d1(u)) / 3
    d2 = lambda u: (y_map(u + h) - 2 * y_map(u) + y_map(u - h)) / h ** 2
    direct = iv.bose_I(lambda u: 1 / d1(u) ** 2, lambda u: -d2(u) / d1(u) ** 3, lambda u: J(y_map(u)), x)
    np.testing.assert_allclose(iv.liouville_potential(J, y_map, x), direct, rtol=1e-4, atol=1e-5)


@pytest.mark.parametrize("kind,params,x", [
    ("confluent", (0.3, 1.4, 1.0), np.linspace(0.3, 4.0, 25)),
    ("hypergeometric", (0.4, 1.3, 1.2), np.linspace(0.2, 0.8, 25)),
])
@pytest.mark.parametrize("c", [(1, 0, 0, 1), (1, 2, 3, 1)])
def test_schwarz_ratio_identity(kind, params, x, c):
    f1, f2 = iv.canonical_solutions(kind, params)
    target = iv.canonical_potential(kind, params)(x)

    def ratio(u):
        return (c[2] * f1(u) + c[3] * f2(u)) / (c[0] * f1(u) + c[1] * f2(u))

    scale = np.maximum(1.0, np.abs(target))
    assert np.max(np.abs(0.5 * iv.schwarzian(ratio, x) - target) / scale) < 1e-4
    # from J = 0 the Liouville map along the ratio lands on the target potential
    assert np.max(np.abs(iv.liouville_potential(lambda y: 0 * y, ratio, x) - target) / scale) < 1e-5


# ---------------------------------------------------------------- equivalence

def test_equivalent_bm_quadratic():
    assert iv.equivalent(pr.to_spec(pr.BM()), logistic_vol()) == pytest.approx(0.125, abs=1e-4)


@pytest.mark.parametrize("a", [1.5, 2.5])
def test_equivalent_bessel_cev(a):
    theta = 1 - 1 / (2 * (2 * a - 1))
    # with both anchors at x = 1 the singular points sit at z = -2 and z = -2(2a - 1)
    rho = iv.equivalent(pr.to_spec(pr.Bessel(a)), cev(theta), max_shift=4 * a)
    assert rho == pytest.approx(0.0, abs=1e-4)


def test_equivalent_negative_control():
    rho, info = iv.equivalent(pr.to_spec(cir(0.5)), pr.to_spec(jacobi(1.0, 1.0)), detail=True)
    assert rho is None
    assert info["spread"] > 1e-2


@pytest.mark.parametrize("base,rho,c", [
    (pr.BM(), 0.5, (1, 1, 0, 1)),
    (pr.OU(0.0, 1.0, 1.0), 0.3, (1, 1, 0, 1)),
    (pr.CIR(0.75, 1.0, 1.0), 0.2, (1, 1, 0, 1)),
    (pr.Jacobi(1.0, 2.0, 1.0, 1.0), 0.2, (1, 1, 1, 2)),
    (pr.Bessel(1.5), 0.0, (0, 1, 1, 0)),
])
def test_equivalent_recovers_transform_rate(base, rho, c):
    t = tr.build_transform(base, rho, *c)
    assert iv.equivalent(pr.to_spec(base), t.target_spec()) == pytest.approx(rho, abs=1e-4)


# ---------------------------------------------------------------- R-families

def test_r_process_reduces_to_cir_and_jacobi():
    x = np.linspace(0.1, 5.0, 9)
    spec = iv.r_family_process("confluent", iv.RPolynomial(0, 1, 0), 0.8, -1.3)
    ref = pr.to_spec(pr.CIR(0.8, 1.3, 1.0))
    np.testing.assert_allclose(spec.drift(x), ref.drift(x), rtol=1e-14)
    np.testing.assert_allclose(spec.vol(x), ref.vol(x), rtol=1e-14)
    x = np.linspace(0.05, 0.95, 9)
    spec = iv.r_family_process("hypergeometric", iv.RPolynomial(0, 1, -1), 0.8, -2.0)
    ref = pr.to_spec(pr.Jacobi(0.8, 2.0, 1.0, 1.0))
    np.testing.assert_allclose(spec.drift(x), ref.drift(x), rtol=1e-13)
    np.testing.assert_allclose(spec.vol(x), ref.vol(x), rtol=1e-13)


@pytest.mark.parametrize("c", [(1, 0, 0, 1), (0, 1, 1, 0), (1, 1, 0, 1), (2, 0.5, 1, 3)])
def test_r_sigma_confluent_matches_cir_transform(c):
    a, b, s, rho = 0.75, 1.0, 1.0, 0.2
    t = tr.build_transform(pr.CIR(a, b, s), rho, *c)
    x = tr.validation_grid(t.base, 60)
    params = (rho / b, 2 * a / s ** 2, 2 * b / s ** 2)
    r = iv.r_family_sigma("confluent", iv.RPolynomial(0, 1, 0), c, params, x) / tr.sigma_y_at_x(t, x)
    assert np.ptp(r) / np.mean(r) < 1e-8


@pytest.mark.parametrize("c", [(1, 0, 0, 1), (0, 1, 1, 0), (1, 1, 0, 1)])
def test_r_sigma_hypergeometric_matches_jacobi_transform(c):
    a, b, s, rho = 1.0, 3.0, 1.0, 0.2
    g, S, P = 2 * a / s ** 2, 2 * b / s ** 2 - 1, 2 * rho / s ** 2
    d = math.sqrt(S * S - 4 * P)
    t = tr.build_transform(pr.Jacobi(a, b, s, 1.0), rho, *c)
    x = tr.validation_grid(t.base, 60)
    r = iv.r_family_sigma("hypergeometric", iv.RPolynomial(0, 1, -1), c, ((S + d) / 2, (S - d) / 2, g), x)
    r = r / tr.sigma_y_at_x(t, x)
    assert np.ptp(r) / np.mean(r) < 1e-8


def test_r_sigma_constant_r_positive():
    x = np.geomspace(1e-3, 30.0, 40)
    v = iv.r_family_sigma("confluent", iv.RPolynomial(1.0), (1, 1), (0.4, 1.5, 1.0), x)
    assert np.all(np.isfinite(v)) and np.all(v > 0)


def test_r_one_plus_x_is_a_new_family():
    spec = iv.r_family_process("confluent", iv.RPolynomial(1.0, 1.0), 1.0, -1.0)
    assert iv.equivalent(spec, pr.to_spec(pr.CIR(1.0, 1.0, 1.0))) is None


@pytest.mark.parametrize("kind,R", [("confluent", iv.RPolynomial(1.0, -1.0)),
                                    ("hypergeometric", iv.RPolynomial(-0.1, 1.0)),
                                    ("hypergeometric", iv.RPolynomial(0.3, -2.0, 2.0))])
def test_invalid_r(kind, R):
    with pytest.raises(InvalidR):
        iv.r_family_process(kind, R, 1.0, -1.0)


def test_unknown_kind():
    with pytest.raises(InvalidR):
        iv.r_family_process("elliptic", iv.RPolynomial(1.0), 1.0, 1.0)
