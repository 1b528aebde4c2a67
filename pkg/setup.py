"""Build script: compiles the optional Monte Carlo kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any failure here downgrades to a pure-Python
install instead of aborting.
"""
import os
import sys

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("NOMA_EC_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "noma_ec._kernels._mc",
                    ["src/noma_ec/_kernels/_mc.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"noma-ec: Cython/NumPy unavailable ({exc}); "
              "installing with the pure-NumPy kernel only.", file=sys.stderr)

setup(ext_modules=ext_modules)
