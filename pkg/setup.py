"""Builds the optional compiled step-timing kernel.

The package works without it: scanrig.kinematics falls back to the pure-Python
ramp generator when the extension is missing. Compile in place with

    python setup.py build_ext --inplace

or simply `pip install -e . --no-build-isolation`.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("scanrig._ramp", ["src/scanrig/_ramp.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
