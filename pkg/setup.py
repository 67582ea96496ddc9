"""Builds the optional compiled Monte-Carlo kernel.

The package works without the extension: ctokit.stats falls back to the
numpy implementation at import time when the compiled module is absent.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "ctokit.stats._mc_kernel",
                ["src/ctokit/stats/_mc_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
