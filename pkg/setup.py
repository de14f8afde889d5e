"""Build script: compiles the optional allocation-scan kernel.

The compiled extension is a pure speedup; if Cython or a C compiler is
missing the build falls back to the pure-Python kernel automatically.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "poa_forge._kernels._scan_cy",
                sources=["src/poa_forge/_kernels/_scan_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on toolchain
    print(f"skipping compiled kernel ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
