"""Build script for the optional Cython extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a failed cythonize is downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/sgdreg/_kernels.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"Cython extension not built ({exc}); pure-python kernels will be used")

setup(ext_modules=ext_modules)
