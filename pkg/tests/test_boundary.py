import math

import pytest

from solvdiff import boundary as bd
from solvdiff import processes as pr
from solvdiff.boundary import BoundaryClass as B
from solvdiff.errors import InconclusiveIntegrability, InvalidParameter, Unsupported


def cir(alpha, b=1.0, sigma=1.0):
    return pr.CIR((alpha + 1) * sigma ** 2 / 2, b, sigma)


def jacobi(alpha, beta, sigma=1.0, A=1.0):
    # beta = 2a/(A sigma^2) - 1, alpha = 2(b - a)/(A sigma^2) - 1 with the A = 1 normalization
    a = (beta + 1) * sigma ** 2 * A / 2
    b = (alpha + beta + 2) * sigma ** 2 / 2
    return pr.Jacobi(a, b, sigma, A)


def test_examples():
    assert bd.classify_endpoint(cir(0.5), "lo") is B.ENTRANCE
    assert bd.classify_endpoint(cir(-0.5), "lo") is B.REGULAR
    for p in (pr.OU(0.0, 1.0, 1.0), pr.OU(0.5, 2.0, 0.7)):
        assert bd.classify_endpoint(p, "lo") is B.NATURAL
        assert bd.classify_endpoint(p, "hi") is B.NATURAL


@pytest.mark.parametrize("which", ["lo", "hi"])
def test_bm_natural(which):
    assert bd.classify_endpoint(pr.BM(), which, method="numeric") is B.NATURAL


# two exponents per range, each more than 0.2 from the critical values -1 and 0
@pytest.mark.parametrize("alpha,expected", [(-3.0, B.EXIT), (-1.5, B.EXIT), (-0.7, B.REGULAR), (-0.3, B.REGULAR),
                                            (0.5, B.ENTRANCE), (2.0, B.ENTRANCE)])
@pytest.mark.parametrize("sigma", [1.0, 0.6])
def test_cir_lower_numeric_matches_table(alpha, expected, sigma):
    p = cir(alpha, sigma=sigma)
    assert bd.table_class(p, "lo") is expected
    assert bd.classify_endpoint(p, "lo", method="numeric") is expected


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 2.0])
def test_cir_upper_natural(alpha):
    assert bd.classify_endpoint(cir(alpha), "hi") is B.NATURAL


@pytest.mark.parametrize("alpha,beta", [(-3.0, 0.5), (-1.5, 2.0), (-0.7, -0.3), (-0.3, -0.7), (0.5, 1.5), (2.0, -3.0)])
@pytest.mark.parametrize("A", [1.0, 2.5])
def test_jacobi_numeric_matches_table(alpha, beta, A):
    p = jacobi(alpha, beta, A=A)
    assert p.alpha == pytest.approx(alpha) and p.beta == pytest.approx(beta)
    for which in ("lo", "hi"):
        assert bd.classify_endpoint(p, which, method="numeric") is bd.table_class(p, which)


@pytest.mark.parametrize("a", [1.5, 3.0])
def test_bessel(a):
    p = pr.Bessel(a)
    assert bd.classify_endpoint(p, "lo", method="numeric") is B.ENTRANCE
    assert bd.classify_endpoint(p, "hi", method="numeric") is B.NATURAL


@pytest.mark.parametrize("alpha", [-1.0 - 1e-3, -1.0, -1.0 + 1e-3, -1e-3, 0.0, 1e-3])
def test_near_critical_is_inconclusive(alpha):
    with pytest.raises(InconclusiveIntegrability):
        bd.classify_endpoint(cir(alpha), "lo", method="numeric")


@pytest.mark.parametrize("alpha,expected", [(-1.0, B.EXIT), (0.0, B.ENTRANCE), (1e-3, B.ENTRANCE)])
def test_auto_falls_back_to_table(alpha, expected):
    cls, info = bd.classify_endpoint(cir(alpha), "lo", detail=True)
    assert cls is expected
    assert info == {"fallback": "table"}


def test_log_divergent_tail_at_infinity():
    # m |s - s(d)| decays like 1/x for OU, so the numeric test alone cannot settle it
    with pytest.raises(InconclusiveIntegrability):
        bd.classify_endpoint(pr.OU(0.0, 1.0, 1.0), "hi", method="numeric")


def test_detail_reports_ratios():
    cls, info = bd.classify_endpoint(cir(-0.5), "lo", method="numeric", detail=True)
    assert cls is B.REGULAR
    # Q ~ x^alpha and R ~ x^(-alpha-1) near 0: both ratios fall towards 2^-(alpha+1) = 2^alpha
    for r in (info["Q"], info["R"]):
        assert r[-1] < 0.9
        assert all(a > b > 2 ** -0.5 for a, b in zip(r[-3:], r[-2:]))


def test_errors():
    with pytest.raises(InvalidParameter):
        bd.classify_endpoint(pr.BM(), "middle")
    with pytest.raises(Unsupported):
        bd.table_class(pr.to_spec(pr.BM()), "lo")
