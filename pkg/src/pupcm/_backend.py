"""Kernel backend selection.

The compiled ``_core`` extension is used when importable; set
``PUPCM_BACKEND=python`` to force the numpy fallback.
"""
import os

from . import _fallback

BACKENDS = {"python": _fallback}

try:
    from . import _core
except ImportError:  # extension not built
    _core = None
else:
    BACKENDS["compiled"] = _core


def get(name=None):
    """Return the kernel module for ``name`` ('compiled', 'python' or None=auto)."""
    name = name or os.environ.get("PUPCM_BACKEND", "auto")
    if name == "auto":
        return _core if _core is not None else _fallback
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; have {sorted(BACKENDS)}"
        ) from None


def active_name():
    return "compiled" if get() is _core and _core is not None else "python"
