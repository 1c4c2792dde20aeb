"""Build script for the optional compiled kernel.

The package is pure Python by default; if Cython and a C compiler are
available, the hot profile-likelihood kernels are compiled to a native
extension.  Without them the install still succeeds and the numpy
fallback in ``symprop._kernels._pure`` is used at import time.

Build in place for development:

    python setup.py build_ext --inplace
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
                "symprop._kernels._native",
                sources=["src/symprop/_kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
