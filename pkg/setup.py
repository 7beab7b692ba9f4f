"""Build script for the optional compiled Monte Carlo kernel.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes large simulations faster.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "stochopt._kernel",
        ["src/stochopt/_kernel.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
