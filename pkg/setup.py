"""Build script: compiles the Cython hour-integration kernel when possible.

The package works without the extension (a pure-Python kernel with identical
arithmetic is selected at import time), so a failed compile is not fatal.
"""

from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "solarsim._kernel",
                sources=["src/solarsim/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"Cython unavailable ({exc}); building pure-Python only")

setup(ext_modules=ext_modules)
