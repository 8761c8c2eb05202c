"""Builds the optional compiled kernel extension.

The package works without the extension (a pure-Python lane is selected at
import time); set VOICECMD_NO_EXT=1 to skip the build entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc}); "
                  f"pure-Python lane will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  f"pure-Python lane will be used")


def _extensions():
    if os.environ.get("VOICECMD_NO_EXT") == "1":
        return []
    pyx = os.path.join("src", "voicecmd", "kernels", "_hot.pyx")
    if not os.path.exists(pyx):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [Extension(
            "voicecmd.kernels._hot",
            [pyx],
            include_dirs=[numpy.get_include()],
            extra_compile_args=["-O3"],
        )],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": _OptionalBuildExt})
