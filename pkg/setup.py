"""Build script: compiles the optional native kernels.

The package works without the extension (a pure-Python/numpy fallback is
selected at import time), so a failed Cython or C build degrades to a
source-only install instead of aborting.  Set REDLINE_SKIP_NATIVE=1 to
skip the extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("REDLINE_SKIP_NATIVE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "redline._kernels._native",
                    ["src/redline/_kernels/_native.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"warning: native kernels not built ({exc}); using pure fallback")

setup(ext_modules=ext_modules)
