# Builds the optional compiled kernels.  If Cython (or a C compiler) is
# unavailable the package still installs; maskent falls back to the numpy
# kernels at import time.  Set MASKENT_NO_EXT=1 to skip the extension.
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MASKENT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("maskent._kernels", ["src/maskent/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
