"""Build script: compiles the optional Cython kernels for the online algorithms.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so cythonization failures are non-fatal: we simply
install the pure-Python package.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "rzfbeam._kernels._online",
                ["src/rzfbeam/_kernels/_online.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - exercised only without Cython
    print(f"rzfbeam: skipping compiled kernels ({exc!r}); "
          "the NumPy fallback will be used")
    ext_modules = []

setup(ext_modules=ext_modules)
