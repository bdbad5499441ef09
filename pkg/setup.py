"""Build script for the optional compiled guidance kernels.

The package is fully functional without the extension: pilotlab.kernels
falls back to vectorized NumPy implementations when the compiled module
is absent (or when PILOTLAB_PURE_PYTHON=1 is set).
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pilotlab.kernels._compiled",
                ["src/pilotlab/kernels/_compiled.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
