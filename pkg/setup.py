"""Build the optional Cython d-separation kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a missing compiler or Cython only costs speed, not features.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("marvel._dsepc", ["src/marvel/_dsepc.pyx"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
