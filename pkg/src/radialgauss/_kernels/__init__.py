"""Kernel backend selection.

The compiled Cython core is used when it is importable; otherwise (or when
``RADIALGAUSS_PURE=1`` is set) the numpy fallback is used.  Both expose the
same functions.  ``BACKEND`` names the active one.
"""

import os

from . import _fallback as fallback

try:
    from . import _core as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("RADIALGAUSS_PURE", "") not in ("1", "true", "yes"):
    active = compiled
    BACKEND = "cython"
else:
    active = fallback
    BACKEND = "python"


def get_backend(name=None):
    """Kernel module by name (``"cython"`` or ``"python"``); ``None`` gives the active one."""
    if name is None:
        return active
    if name == "python":
        return fallback
    if name == "cython":
        if compiled is None:
            raise ImportError("the compiled kernel extension is not built")
        return compiled
    raise ValueError(f"unknown kernel backend {name!r}")


__all__ = ["BACKEND", "active", "compiled", "fallback", "get_backend"]
