"""Build script for the optional compiled propagation core.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a failed compilation only costs speed, not correctness.
"""

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Degrade to the pure-Python backend if the extension cannot build."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"WARNING: compiled core skipped ({exc}); "
                  "falling back to the pure-Python propagator")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"WARNING: building {ext.name} failed ({exc}); "
                  "falling back to the pure-Python propagator")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "atomcavity.dynamics._core",
                ["src/atomcavity/dynamics/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
