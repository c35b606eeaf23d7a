"""Dot-product scan kernels with a compiled core and a pure-Python twin.

The compiled extension is optional; import falls back to the pure backend
when it is absent. Set ``SIMLOOP_PURE=1`` to force the fallback (used by
the parity tests and the benchmark). Both backends accumulate in the same
sequential order, so their results are bit-identical.
"""
from __future__ import annotations

import os

if os.environ.get("SIMLOOP_PURE"):
    from simloop.kernels import _pure as _impl

    IMPLEMENTATION = "pure"
else:
    try:
        from simloop.kernels import _native as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "native"
    except ImportError:
        from simloop.kernels import _pure as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "pure"

dot = _impl.dot
scan = _impl.scan

__all__ = ["dot", "scan", "IMPLEMENTATION"]
