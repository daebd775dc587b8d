"""Builds the epimc_py extension module by delegating to cargo.

Neither maturin nor setuptools-rust is assumed to be available, so a plain
build_ext override compiles the cdylib crate and copies the artifact to
wherever setuptools expects the extension.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


def cdylib_name() -> str:
    if sys.platform == "win32":
        return "epimc_py.dll"
    if sys.platform == "darwin":
        return "libepimc_py.dylib"
    return "libepimc_py.so"


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "epimc-py"],
            cwd=ROOT,
            check=True,
        )
        built = ROOT / "target" / "release" / cdylib_name()
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[Extension("epimc_py", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
