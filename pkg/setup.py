"""Builds the compiled stepping kernels.

The extension is optional: if Cython or a C compiler is missing the install
still succeeds and the package falls back to the pure-numpy kernels at import.
-ffp-contract=off keeps the compiler from fusing multiply-adds so the compiled
arithmetic stays bitwise-identical to the numpy reference kernels.
"""

from setuptools import setup
from setuptools.extension import Extension

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "haptosim._core",
        ["src/haptosim/_core.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
    for e in ext_modules:
        e.optional = True

setup(ext_modules=ext_modules)
