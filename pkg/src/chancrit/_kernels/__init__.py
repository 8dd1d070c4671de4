"""Contraction kernels with a compiled core and a pure-numpy fallback.

The compiled extension is optional; if it failed to build or import, the
numpy implementation is used transparently.  ``set_backend`` lets tests and
benchmarks pin a specific implementation.
"""
from __future__ import annotations

from . import _fallback
from ._fallback import boundary_environment, close_environment

try:
    from . import _core

    _HAVE_CORE = True
except ImportError:
    _core = None
    _HAVE_CORE = False

_active = _core if _HAVE_CORE else _fallback


def available_backends():
    names = ["numpy"]
    if _HAVE_CORE:
        names.append("compiled")
    return names


def get_backend():
    return "compiled" if _active is _core else "numpy"


def set_backend(name):
    """Select 'numpy' or 'compiled'; raises if the choice is unavailable."""
    global _active
    if name == "numpy":
        _active = _fallback
    elif name == "compiled":
        if not _HAVE_CORE:
            raise RuntimeError("compiled kernel is not available")
        _active = _core
    else:
        raise ValueError(f"unknown backend {name!r}")


def apply_site(env, site_tensor, op, n):
    return _active.apply_site(env, site_tensor, op, n)
