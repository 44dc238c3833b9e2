"""Build script: compiles the optional split-finding extension.

The package works without the extension (a numpy fallback is selected at
import time); failures here therefore degrade the install instead of
breaking it.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the Cython kernels if possible, otherwise continue without."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            print(f"warning: building the compiled kernels failed ({exc}); "
                  "falling back to the pure-Python implementation",
                  file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} failed to compile ({exc}); "
                  "falling back to the pure-Python implementation",
                  file=sys.stderr)


def extensions():
    if os.environ.get("VACSCREEN_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython or numpy unavailable; skipping compiled kernels",
              file=sys.stderr)
        return []
    ext = Extension(
        "vacscreen.classify._split_ext",
        ["src/vacscreen/classify/_split_ext.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
