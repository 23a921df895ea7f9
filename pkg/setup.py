"""Build script: compiles the optional MPFR orbit kernel.

The kernel links against the MPFR/GMP shared libraries bundled with the
gmpy2 wheel when present (so exactly one library copy is loaded at runtime),
falling back to system -lmpfr -lgmp.  If Cython or a compiler is missing the
package still installs; orbit loops then run on the pure-Python backend.
"""
import glob
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def kernel_extension():
    try:
        from Cython.Build import cythonize
        import gmpy2
    except ImportError as exc:
        print(f"iterasym: skipping compiled kernel ({exc})", file=sys.stderr)
        return []

    from setuptools import Extension

    gmpy2_dir = os.path.dirname(gmpy2.__file__)
    libs_dir = os.path.join(os.path.dirname(gmpy2_dir), "gmpy2.libs")
    libraries = []
    link_args = []
    if os.path.isdir(libs_dir):
        wanted = []
        for pat in ("libmpfr-*.so*", "libgmp-*.so*"):
            hits = sorted(glob.glob(os.path.join(libs_dir, pat)))
            if hits:
                wanted.append(os.path.basename(hits[0]))
        if len(wanted) == 2:
            link_args = ["-L" + libs_dir, "-Wl,-rpath," + libs_dir]
            link_args += ["-l:" + name for name in wanted]
    if not link_args:
        libraries = ["mpfr", "gmp"]

    ext = Extension(
        "iterasym._kernels._fast",
        ["src/iterasym/_kernels/_fast.pyx"],
        include_dirs=[gmpy2_dir],
        libraries=libraries,
        extra_link_args=link_args,
    )
    return cythonize([ext], language_level=3)


class optional_build_ext(build_ext):
    """Never fail the install over the accelerator."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, headers missing, ...
            print(f"iterasym: compiled kernel build failed, using pure-Python "
                  f"orbits ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"iterasym: compiled kernel build failed, using pure-Python "
                  f"orbits ({exc})", file=sys.stderr)


setup(
    ext_modules=kernel_extension(),
    cmdclass={"build_ext": optional_build_ext},
)
