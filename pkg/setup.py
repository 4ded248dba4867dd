"""Build the optional Cython jet kernels.

If Cython or a compiler is unavailable the package still installs; the
pure-Python kernels in ``abmetric._jetcore_py`` are used instead.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("ABMETRIC_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("abmetric._jetcore", ["src/abmetric/_jetcore.pyx"])],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
