"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twin takes over. Both expose the same functions, so callers never branch.
"""
import importlib

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

active = _compiled if _compiled is not None else _pykernels
BACKEND = active.NAME


def available():
    """Names of the backends that can be loaded in this environment."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(name=None):
    """Return a kernel module by name (``"compiled"`` or ``"python"``); default is the active one."""
    if name is None:
        return active
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def reload_compiled():
    """Re-import the extension after an in-place build; returns the new backend name."""
    global _compiled, active, BACKEND
    try:
        _compiled = importlib.import_module(__package__ + "._kernels")
    except ImportError:
        _compiled = None
    active = _compiled if _compiled is not None else _pykernels
    BACKEND = active.NAME
    return BACKEND
