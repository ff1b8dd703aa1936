import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    'Build the accelerator if we can; fall back to the pure backend if not.'

    def run(self):
        try:
            build_ext.run(self)
        except Exception as exc:
            print(f"warning: compiled kernels skipped ({exc}); using pure-Python backend")

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except Exception as exc:
            print(f"warning: {ext.name} not built ({exc}); using pure-Python backend")


extensions = []
if cythonize is not None and not os.environ.get("VALIM_NO_EXT"):
    extensions = cythonize(
        [
            Extension(
                "valim._kernels._fastcore",
                ["src/valim/_kernels/_fastcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
