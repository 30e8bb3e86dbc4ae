"""Build script: compiles the optional simulation kernel.

The package works without the extension (a vectorized numpy fallback is
selected at import time), so a failed compile downgrades to a warning
instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            warnings.warn(f"building the compiled kernel failed ({exc}); "
                          "falling back to the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-Python backend")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"Cython/numpy unavailable at build time ({exc}); "
                      "installing without the compiled kernel")
        return []
    ext = Extension(
        "occutime._kernels",
        ["src/occutime/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
