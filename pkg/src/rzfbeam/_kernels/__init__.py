"""Kernel backend selection for the online algorithms.

Importing this package picks the compiled Cython kernels when the extension
was built and silently falls back to the NumPy reference implementation
otherwise.  Both expose the same ``ddaa_run`` / ``cnlms_run`` signatures and
produce matching results (up to floating-point reassociation).
"""

from __future__ import annotations

try:
    from . import _online as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built; use the reference implementation
    from . import fallback as _impl

    BACKEND = "fallback"

ddaa_run = _impl.ddaa_run
cnlms_run = _impl.cnlms_run


def backend() -> str:
    """Name of the active kernel backend ("compiled" or "fallback")."""
    return BACKEND


__all__ = ["ddaa_run", "cnlms_run", "backend", "BACKEND"]
