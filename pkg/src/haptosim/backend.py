"""Kernel backend selection: compiled extension if built, numpy otherwise.

The environment variable HAPTOSIM_BACKEND forces a choice:
  HAPTOSIM_BACKEND=fallback  always use the pure-numpy kernels
  HAPTOSIM_BACKEND=compiled  require the extension (ImportError if missing)
Both backends implement the same kernel contract (see _fallback) and produce
bitwise-identical trajectories.
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _core
except ImportError:
    _core = None

NAMES = ("compiled", "fallback")


def available() -> tuple[str, ...]:
    """Backend names usable in this installation."""
    return NAMES if _core is not None else ("fallback",)


def resolve(name: str | None = None):
    """Return the kernel module for `name` (None: env override or best)."""
    if name is None:
        name = os.environ.get("HAPTOSIM_BACKEND") or None
    if name is None:
        return _core if _core is not None else _fallback
    if name == "fallback":
        return _fallback
    if name == "compiled":
        if _core is None:
            raise ImportError(
                "HAPTOSIM_BACKEND=compiled but haptosim._core is not built; "
                "reinstall with Cython and a C compiler available"
            )
        return _core
    raise ValueError(f"unknown backend {name!r}, expected one of {NAMES}")


def selected_name() -> str:
    """Name of the backend resolve() picks by default."""
    return "compiled" if resolve() is _core else "fallback"
