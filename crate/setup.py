"""Build the `klsep._native` extension by delegating to cargo.

Neither maturin nor setuptools-rust is assumed; the extension is an abi3
cdylib, so a release `cargo build` plus a file copy is all that's needed.
"""

import shutil
import subprocess
import sysconfig
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).parent.resolve()


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "klsep-py"],
            cwd=ROOT,
            check=True,
        )
        libname = {
            "win32": "klsep_py.dll",
            "darwin": "libklsep_py.dylib",
        }.get(sysconfig.get_platform().split("-")[0], "libklsep_py.so")
        built = ROOT / "target" / "release" / libname
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[Extension("klsep._native", sources=[], py_limited_api=True)],
    cmdclass={"build_ext": CargoBuildExt},
    options={"bdist_wheel": {"py_limited_api": "cp38"}},
)
