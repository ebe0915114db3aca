"""Build hook: compiles the optional Cython kernels.

The package works without the extension (a pure-Python fallback is selected
at import time), so any build failure here is non-fatal.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/fdmlink/_ckernels.pyx",
        compiler_directives={"language_level": 3},
    )
    include_dirs = [numpy.get_include()]
except Exception:
    ext_modules = []
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
