"""Build script for the optional compiled integrator kernel.

The package is fully functional without the extension (a pure-Python kernel
is selected at import time); the compiled kernel is what makes dense Poincare
sweeps fast.  If Cython or a C compiler is unavailable the build degrades to
pure Python instead of failing.
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
                "rabichaos._kernel_cy",
                ["src/rabichaos/_kernel_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
