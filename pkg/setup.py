"""Build script for the optional compiled kernel core.

The package is fully functional without the extension; fisherflow.backend
falls back to the numpy reference kernels when the compiled module is
missing.  Build in place with `python setup.py build_ext --inplace`.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fisherflow.backend._fastcore",
                ["src/fisherflow/backend/_fastcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Cython or numpy unavailable at build time: install pure-python only.
    ext_modules = []

setup(ext_modules=ext_modules)
