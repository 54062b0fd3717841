"""Build the compiled eigenkernel.

The extension is optional: if Cython or a C compiler is missing the
package installs without it and falls back to the numpy kernel.
"""
import os

from setuptools import Extension, setup

CFLAGS = ["-O3", "-fno-math-errno", "-fcx-limited-range"]


def ext_modules():
    if os.environ.get("CAVITYBERRY_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "cavityberry.eigensolve._kernels",
        ["src/cavityberry/eigensolve/_kernels.pyx"],
        extra_compile_args=CFLAGS,
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=ext_modules())
