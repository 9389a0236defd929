"""Build script: compiles the optional simplex pivot kernel.

The package is pure Python; the Cython extension only accelerates the hot
pivot loop.  If Cython or a C compiler is missing the build falls back to the
pure-Python kernel without failing the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, but degrade to pure Python on any toolchain error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure is fine
            sys.stderr.write(
                "warning: compiled kernel skipped (%s); "
                "using the pure-Python kernel\n" % exc
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            sys.stderr.write(
                "warning: %s skipped (%s); using the pure-Python kernel\n"
                % (ext.name, exc)
            )


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "pwlmip._kernel._speedups",
                ["src/pwlmip/_kernel/_speedups.pyx"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
