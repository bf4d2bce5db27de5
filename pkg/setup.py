"""Build script for the compiled mesh kernel.

Metadata lives in pyproject.toml. If Cython or a C compiler is missing the
package still installs and falls back to the pure-Python kernel.
"""
from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = [Extension("chipletsim.interconnect._mesh_core",
                            ["src/chipletsim/interconnect/_mesh_core.pyx"],
                            include_dirs=[numpy.get_include()],
                            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                            extra_compile_args=["-O3"])]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
