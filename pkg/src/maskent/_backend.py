"""Kernel backend selection.

The compiled extension is used when importable; the numpy fallback
otherwise.  Set MASKENT_BACKEND=python to force the fallback (any other
value, or unset, prefers the extension).
"""

from __future__ import annotations

import os

from maskent import _kernels_py

if os.environ.get("MASKENT_BACKEND", "").strip().lower() == "python":
    _impl = _kernels_py
else:
    try:
        from maskent import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.NAME
family_stats = _impl.family_stats
pair_stats = _impl.pair_stats


def available_backends():
    """Importable kernel modules by name."""
    found = {"python": _kernels_py}
    try:
        from maskent import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
