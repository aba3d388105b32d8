"""Build script: compiles the Cython hot-loop kernels when a toolchain is
available.  The extension is marked optional; if compilation fails the
package still installs and falls back to the pure-NumPy kernels at import
time (see gffv/core.py)."""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "gffv._fvcore",
        ["src/gffv/_fvcore.pyx"],
        include_dirs=[np.get_include()],
        # -ffp-contract=off keeps the compiled kernels bit-identical to the
        # NumPy fallback (no FMA contraction), which the parity tests assert.
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize(ext, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
