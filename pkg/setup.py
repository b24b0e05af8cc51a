from setuptools import setup

try:
    from Cython.Build import cythonize
    ext_modules = cythonize(
        ["src/gselfies/_match/core.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:  # build without the compiled kernel; pure fallback is used
    ext_modules = []

setup(ext_modules=ext_modules)
