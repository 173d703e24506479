"""Build the optional Cython kernels; fall back to a pure install if that fails."""

from setuptools import setup


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "solvdiff._kernels",
        ["src/solvdiff/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


try:
    setup(ext_modules=_extensions())
except SystemExit:
    setup()
