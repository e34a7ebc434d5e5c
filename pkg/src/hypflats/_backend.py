"""Kernel backend selection: compiled extension if available, NumPy otherwise.

Set HYPFLATS_PURE_PYTHON=1 to force the NumPy implementation.  The
benchmark suite uses set_backend() to compare both.
"""

import os

from . import _kernels_py

_IMPLS = {"python": _kernels_py}
try:
    from . import _kernels_cy

    _IMPLS["cython"] = _kernels_cy
except ImportError:  # extension not built
    pass

_current = "python"
log_kernel = _kernels_py.log_kernel
log_kernel_theta = _kernels_py.log_kernel_theta


def available_backends():
    return tuple(sorted(_IMPLS))


def backend_name():
    """Name of the kernel implementation currently in use."""
    return _current


def set_backend(name):
    """Rebind the kernel functions to the named implementation."""
    global _current, log_kernel, log_kernel_theta
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    impl = _IMPLS[name]
    _current = name
    log_kernel = impl.log_kernel
    log_kernel_theta = impl.log_kernel_theta


if os.environ.get("HYPFLATS_PURE_PYTHON") != "1" and "cython" in _IMPLS:
    set_backend("cython")
