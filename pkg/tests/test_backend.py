import json
import os
import subprocess
import sys

import numpy as np
import pytest

from solvdiff import _kernels_py as py

cy = pytest.importorskip("solvdiff._kernels")

Z = np.ascontiguousarray(np.linspace(-0.95, 0.95, 41))
X = np.ascontiguousarray(np.linspace(-3.0, 3.0, 37))


def close(a, b, rtol=1e-13):
    np.testing.assert_allclose(a, b, rtol=rtol, atol=1e-300)


@pytest.mark.parametrize("a,b,c", [(0.5, 1.5, 2.25), (-3.0, 1.2, 0.7), (2.0, 2.0, 4.5)])
def test_hyp2f1_parity(a, b, c):
    vc, fc = cy.hyp2f1_series_array(a, b, c, Z, 1e-16, 5000)
    vp, fp = py.hyp2f1_series_array(a, b, c, Z, 1e-16, 5000)
    assert fc == fp == 0
    close(vc, vp)


def test_hyp1f1_and_bessel_parity():
    z = np.ascontiguousarray(np.linspace(0.0, 20.0, 33))
    close(cy.hyp1f1_series_array(0.7, 1.9, z, 1e-16, 5000)[0], py.hyp1f1_series_array(0.7, 1.9, z, 1e-16, 5000)[0])
    close(cy.bessel_i_tail_array(1.3, z, 1e-16, 5000)[0], py.bessel_i_tail_array(1.3, z, 1e-16, 5000)[0])


def test_scalar_parity_reports_terms():
    assert cy.hyp1f1_series(0.5, 1.5, 2.0, 1e-16, 5000) == py.hyp1f1_series(0.5, 1.5, 2.0, 1e-16, 5000)
    assert cy.hyp1f1_series(0.5, 1.5, 2.0, 1e-16, 3)[1] == py.hyp1f1_series(0.5, 1.5, 2.0, 1e-16, 3)[1] == -1


def test_u_integral_parity():
    z = np.ascontiguousarray(np.linspace(0.5, 30.0, 17))
    close(cy.u_integral_log(0.8, 1.7, z, 0.05, -4.0, 4.0), py.u_integral_log(0.8, 1.7, z, 0.05, -4.0, 4.0), 1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 7, 20])
def test_orthogonal_polynomial_parity(n):
    close(cy.hermite_array(n, X), py.hermite_array(n, X))
    close(cy.laguerre_array(n, 0.4, X + 3.0), py.laguerre_array(n, 0.4, X + 3.0))
    u = np.ascontiguousarray(X / 3.0)
    close(cy.jacobi_array(n, 0.3, -0.2, u), py.jacobi_array(n, 0.3, -0.2, u))


def test_env_var_forces_fallback():
    code = "import solvdiff; print(solvdiff.BACKEND)"
    env = dict(os.environ, SOLVDIFF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env["SOLVDIFF_PURE_PYTHON"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"


def _public_values(pure):
    code = ("import json, numpy as np; from solvdiff import specfun as s; z = np.linspace(0.1, 8.0, 25); "
            "print(json.dumps(np.concatenate([s.kummer_m(0.6, 1.4, z), s.tricomi_u(0.6, 1.4, z), "
            "s.gauss_2f1(0.3, 0.9, 1.7, z / 9)]).tolist()))")
    env = dict(os.environ, SOLVDIFF_PURE_PYTHON=pure)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return np.array(json.loads(out.stdout))


def test_public_results_match_across_backends():
    close(_public_values("0"), _public_values("1"), 1e-12)
