"""Kernel selection: compiled extension when available, Python fallback otherwise.

Set SOLARSIM_KERNEL=python to force the fallback (used by the parity tests
and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("SOLARSIM_KERNEL") == "python":
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

drive_hour = _impl.drive_hour
IMPLEMENTATION: str = _impl.IMPLEMENTATION

__all__ = ["drive_hour", "IMPLEMENTATION"]
