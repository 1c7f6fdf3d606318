import os

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    directives = {
        "language_level": "3",
        "boundscheck": False,
        "wraparound": False,
        "initializedcheck": False,
        "cdivision": True,
    }
    ext_modules = cythonize(
        [
            Extension(
                "templater.kernels._mcs_cy",
                [os.path.join("src", "templater", "kernels", "_mcs_cy.pyx")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives=directives,
    )
except ImportError:
    # No Cython available: install the pure-Python package; the kernel
    # selector falls back automatically.
    pass

setup(ext_modules=ext_modules)
