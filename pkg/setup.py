"""Build script: compiles the kernel module to a C extension when Cython and a
C toolchain are available, and falls back to a pure-Python install otherwise.

The same source file (src/treeroute/_core/kernels.py) serves both backends; the
compiled variant is installed under a separate module name so the package can
pick a backend at import time.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Degrade to a pure-Python install when the extension cannot be built."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing or broken
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"warning: building the compiled kernels failed ({exc}); "
              "installing with the pure-Python backend only")


ext_modules = []
if os.environ.get("TREEROUTE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("treeroute._core._compiled",
                       ["src/treeroute/_core/kernels.py"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        print("warning: Cython not available; "
              "installing with the pure-Python backend only")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
