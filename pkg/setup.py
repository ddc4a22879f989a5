"""Build script: compiles the optional C kernels, falling back to pure python.

The package is fully functional without the extension; the compiled kernels
only make the hot loops (core peeling, sparse products, decoder pass) fast.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            print(f"WARNING: skipping compiled kernels ({exc}); "
                  "using the pure-python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: could not build {ext.name} ({exc}); "
                  "using the pure-python fallback")


ext_modules = []
if not os.environ.get("COREGAE_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "coregae._kernels._ckern",
                    ["src/coregae/_kernels/_ckern.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3", "-march=native", "-ffast-math"],
                    # -ffast-math vectorizes exp/log1p through libmvec
                    libraries=["mvec", "m"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"WARNING: Cython/numpy unavailable ({exc}); "
              "building without compiled kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
