"""Build the optional compiled kernel extension.

The package works without it (a numpy fallback is selected at import);
the extension just makes the hot loops faster. -ffp-contract=off keeps the
DWT accumulation order bit-identical to the fallback.
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
                "cgcluster._kernels",
                ["src/cgcluster/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
