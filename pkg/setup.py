"""Build script: compiles the optional fast kernel extension when Cython is available.

The package is fully functional without the extension (a pure-Python/numpy
backend is selected at import time), so any build failure here downgrades to
a source-only install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/convdual/_kernels/_fast.pyx"],
        language_level="3",
    )
    include_dirs = [numpy.get_include()]
except Exception:
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
