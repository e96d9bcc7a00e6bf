import pybind11
from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "emofuse_adapter._libav",
            sources=["src/emofuse_adapter/_libav.cpp"],
            include_dirs=[pybind11.get_include()],
            libraries=["avformat", "avcodec", "avutil", "swresample"],
            extra_compile_args=["-std=c++17", "-O2"],
        )
    ]
)
