import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup


def _compile_args():
    # The pair kernels live or die on vectorized pow; -march=native enables the
    # wide FMA units where available and is dropped on builds that reject it.
    args = ["-O3", "-ffast-math", "-fopenmp"]
    if os.environ.get("RENEWLM_PORTABLE", "0") != "1":
        args.append("-march=native")
    return args


extensions = [
    Extension(
        "renewlm.kernels._core",
        sources=["src/renewlm/kernels/_core.pyx"],
        include_dirs=[np.get_include(), "src/renewlm/kernels"],
        extra_compile_args=_compile_args(),
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_9_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
