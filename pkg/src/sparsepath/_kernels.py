"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback. ``SPARSEPATH_BACKEND`` (``compiled`` | ``python``) overrides the
choice at import time, and :func:`use_backend` switches it at runtime.
"""

import contextlib
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels


def _initial():
    name = os.environ.get("SPARSEPATH_BACKEND", "").strip().lower()
    if name in ("", "auto"):
        return "compiled" if "compiled" in BACKENDS else "python"
    if name not in BACKENDS:
        raise ImportError(
            f"SPARSEPATH_BACKEND={name!r} is not available; have {sorted(BACKENDS)}"
        )
    return name


_active_name = _initial()
active = BACKENDS[_active_name]


def available_backends():
    return sorted(BACKENDS)


def backend_name():
    return _active_name


def set_backend(name):
    global active, _active_name
    if name not in BACKENDS:
        raise ValueError(f"unknown or unbuilt backend {name!r}; have {sorted(BACKENDS)}")
    _active_name = name
    active = BACKENDS[name]


@contextlib.contextmanager
def use_backend(name):
    previous = _active_name
    set_backend(name)
    try:
        yield BACKENDS[name]
    finally:
        set_backend(previous)
