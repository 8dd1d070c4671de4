"""Build script: compiles the optional contraction kernel extension.

If Cython or a C compiler is unavailable the build falls back to a
pure-python install; the package selects the numpy kernels at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/chancrit/_kernels/_core.pyx"],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write("chancrit: skipping compiled kernels (%s)\n" % exc)
    ext_modules = []

setup(ext_modules=ext_modules)
