import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "zetalab._speedups",
                ["src/zetalab/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Cython unavailable: build a pure-Python package; the enumeration
    # falls back to the interpreted kernel at import time.
    extensions = []

setup(ext_modules=extensions)
