import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "sscn._secular_cy",
        ["src/sscn/_secular_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O2"],
        optional=True,  # fall back to the pure-Python kernel if the build fails
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
