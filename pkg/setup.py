from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # extension skipped; the pure NumPy kernel is used instead
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "traceminmax._kernel._ceigh",
                ["src/traceminmax/_kernel/_ceigh.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=extensions)
