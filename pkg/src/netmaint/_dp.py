"""Kernel selection: compiled core when available, numpy fallback otherwise.

Set ``NETMAINT_PURE=1`` to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""
from __future__ import annotations

import os

from . import _dp_fallback

if os.environ.get("NETMAINT_PURE") == "1":
    dp_backward = _dp_fallback.dp_backward
    BACKEND = "python"
else:
    try:
        from ._dp_core import dp_backward  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        dp_backward = _dp_fallback.dp_backward
        BACKEND = "python"
