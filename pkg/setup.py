"""Build script for the compiled kernel lane.

The extension is optional at runtime: ``polyaurn._kernels`` falls back to
its pure-Python twin when the compiled module is absent.
"""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "polyaurn._kernels._fast",
        ["src/polyaurn/_kernels/_fast.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
