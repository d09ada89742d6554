"""Kernel dispatch: the compiled extension when it imports, numpy otherwise.

Set ``BRF_PURE_PYTHON=1`` to force the numpy path.
"""
import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def get_backend(name):
    """Return the kernel module called ``name`` (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _fallback
    if name == "cython":
        if _compiled is None:
            raise ImportError("brforest._kernels is not compiled")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    return ["cython", "python"] if _compiled is not None else ["python"]


if os.environ.get("BRF_PURE_PYTHON") or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = get_backend(BACKEND)
cmi_sum = _impl.cmi_sum
route = _impl.route

__all__ = ["BACKEND", "cmi_sum", "route", "get_backend", "available_backends"]
