"""Builds the optional compiled scan kernels.

The package works without the extension (a pure-Python backend is selected
at import time), so compilation failures only cost speed, never installs.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "simloop.kernels._native",
                ["src/simloop/kernels/_native.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
