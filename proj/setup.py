"""Builds the _endosaa extension through the project's CMake configuration.

The extension target links the static core library, so delegating to CMake
keeps a single build description for the C++ code; this file only teaches
setuptools where the resulting shared object lands.
"""

import os
import subprocess
import sysconfig
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        out_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        out_path.parent.mkdir(parents=True, exist_ok=True)

        config = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={config}",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build", str(build_dir),
                "--target", "_endosaa",
                "--parallel", str(os.cpu_count() or 2),
            ],
            check=True,
        )

        suffix = sysconfig.get_config_var("EXT_SUFFIX")
        built = build_dir / f"_endosaa{suffix}"
        if not built.exists():  # single-config generators put it at the root
            candidates = list(build_dir.rglob(f"_endosaa{suffix}"))
            if not candidates:
                raise FileNotFoundError(f"_endosaa{suffix} not produced under {build_dir}")
            built = candidates[0]
        self.copy_file(str(built), str(out_path))


setup(
    packages=["endosaa"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("endosaa._endosaa")],
    cmdclass={"build_ext": CMakeBuild},
)
