"""Build script: compiles the optional Cython kernel core.

The package is fully functional without the extension; hypflats._backend
falls back to the NumPy implementation when the compiled module is absent.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "hypflats._kernels_cy",
                ["src/hypflats/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
