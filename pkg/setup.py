"""Build script for the optional compiled kernel extension.

The simulator runs fine without the extension (a pure Python mirror of the
kernels is bundled); building it just makes the per-slot beamforming loops
roughly an order of magnitude faster.  -ffp-contract=off keeps the compiler
from fusing multiply-adds so the compiled kernels stay bit-identical to the
pure Python reference.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "relaysim.kernels._core",
                ["src/relaysim/kernels/_core.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
