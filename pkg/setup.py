from Cython.Build import cythonize
from setuptools import Extension, setup

setup(
    ext_modules=cythonize(
        [Extension("siegel_local._kernels", ["src/siegel_local/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
)
