from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the Cython kernels when possible; the numpy fallback covers failures."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using the Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: failed to build {ext.name} ({exc}); using the Python fallback")


try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("folcalc._kernels", ["src/folcalc/_kernels.pyx"], extra_compile_args=["-O3"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []


setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
