"""Build script: compiles the optional scoring-kernel extension.

The package works without the compiled extension (a pure-Python/numpy
fallback is selected at import time), so a failed extension build only
costs speed, never functionality. Set LYRICSEARCH_NO_EXT=1 to skip the
extension entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("LYRICSEARCH_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/lyricsearch/_kernels/_speed.pyx"],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
