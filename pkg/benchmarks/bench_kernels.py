"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-N wall time for both backends and the speed-up.
"""

import argparse
import timeit

import numpy as np

from solvdiff import _kernels_py as py

try:
    from solvdiff import _kernels as cy
except ImportError:
    cy = None

Z_SMALL = np.ascontiguousarray(np.linspace(-0.9, 0.9, 2000))
Z_POS = np.ascontiguousarray(np.linspace(0.1, 25.0, 2000))
X = np.ascontiguousarray(np.linspace(-1.0, 1.0, 2000))

CASES = {
    "hyp2f1_series_array": lambda k: k.hyp2f1_series_array(0.5, 1.5, 2.25, Z_SMALL, 1e-16, 5000),
    "hyp1f1_series_array": lambda k: k.hyp1f1_series_array(0.7, 1.9, Z_POS, 1e-16, 5000),
    "bessel_i_tail_array": lambda k: k.bessel_i_tail_array(1.3, Z_POS, 1e-16, 5000),
    "u_integral_log": lambda k: k.u_integral_log(0.8, 1.7, Z_POS, 0.05, -4.0, 4.0),
    "hermite_array(40)": lambda k: k.hermite_array(40, X),
    "laguerre_array(40)": lambda k: k.laguerre_array(40, 0.4, X + 1.0),
    "jacobi_array(40)": lambda k: k.jacobi_array(40, 0.3, -0.2, X),
}


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels not built; only the fallback is available")
    print(f"{'kernel':<22}{'python [ms]':>13}{'cython [ms]':>13}{'speed-up':>10}")
    for name, case in CASES.items():
        tp = best(lambda: case(py), args.repeat)
        if cy is None:
            print(f"{name:<22}{1e3 * tp:>13.2f}{'-':>13}{'-':>10}")
            continue
        tc = best(lambda: case(cy), args.repeat)
        print(f"{name:<22}{1e3 * tp:>13.2f}{1e3 * tc:>13.3f}{tp / tc:>9.0f}x")


if __name__ == "__main__":
    main()
