"""Kernel dispatch: compiled modem loops with a pure-Python fallback.

The compiled extension is optional; if it failed to build or is missing,
the pure-Python implementations take over with identical behavior.
"""

from __future__ import annotations

try:
    from . import _ckernels as _impl

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

    HAVE_COMPILED = False

slicer_loop = _impl.slicer_loop
demod_loop = _impl.demod_loop


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "python"
