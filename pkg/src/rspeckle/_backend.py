"""Kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
pure-numpy fallback is always available.  Set RSPECKLE_BACKEND=python (or
cython) to force a choice; forcing cython without the extension built is an
error rather than a silent fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("RSPECKLE_BACKEND", "").strip().lower()
if _forced == "python":
    kernels = _kernels_py
elif _forced == "cython":
    if _compiled is None:
        raise ImportError(
            "RSPECKLE_BACKEND=cython but the compiled extension is not available"
        )
    kernels = _compiled
elif _forced:
    raise ImportError(f"unknown RSPECKLE_BACKEND value {_forced!r}")
else:
    kernels = _compiled if _compiled is not None else _kernels_py

BACKEND = kernels.BACKEND


def available_backends():
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
