from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback kernels are used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("vortexlab._ckernels", ["src/vortexlab/_ckernels.pyx"], libraries=["m"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
