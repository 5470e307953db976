"""Build script: compiles the optional Cython kernel core.

The extension is a pure accelerator; when Cython, numpy headers or a C
compiler are unavailable the build falls back to the numpy kernels and
installation still succeeds.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow compiler failures so the extension stays optional."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to compile {ext.name} ({exc}); using numpy kernels")


def make_extensions():
    if os.environ.get("COSSERAT_NO_EXTENSION") == "1":
        return []
    try:
        import numpy
    except ImportError as exc:
        print(f"warning: {exc}; building without compiled kernels")
        return []
    kwargs = dict(
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "cosserat._kernels._core", ["src/cosserat/_kernels/_core.pyx"], **kwargs
        )
        return cythonize(ext, language_level=3)
    except ImportError:
        pass
    # no Cython: fall back to the pregenerated C file when present
    c_path = "src/cosserat/_kernels/_core.c"
    if os.path.exists(c_path):
        return [Extension("cosserat._kernels._core", [c_path], **kwargs)]
    print("warning: Cython unavailable and no pregenerated C; using numpy kernels")
    return []


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
