import sys

from setuptools import Extension, setup

# The compiled kernels are an optimization, not a requirement: if Cython or a
# C compiler is missing the package installs anyway and falls back to the
# pure-Python backend at import time.
ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "geodepth._kernels",
                ["src/geodepth/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: the pure backend is the semantic reference
                # and FMA contraction would let the C results drift from it.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    sys.stderr.write(f"geodepth: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
