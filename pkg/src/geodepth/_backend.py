"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
Python module is the reference implementation and the fallback. Both
produce bit-identical results, so the switch only changes speed. Set
GEODEPTH_PURE=1 to force the fallback (used by the cross-backend tests
and handy when debugging a kernel).
"""

import os

from geodepth import _kernels_py

_forced_pure = os.environ.get("GEODEPTH_PURE", "") not in ("", "0")

if _forced_pure:
    kernels = _kernels_py
else:
    try:
        from geodepth import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

COMPILED = bool(kernels.COMPILED)


def backend_name():
    return "compiled" if COMPILED else "pure"
