import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("WITTLAB_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("wittlab._kernels", ["src/wittlab/_kernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        # Pure-Python fallback is selected at import time; the compiled
        # kernels are an optimization, not a requirement.
        ext_modules = []

setup(ext_modules=ext_modules)
