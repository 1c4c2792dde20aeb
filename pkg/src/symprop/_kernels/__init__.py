"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
implementation is the fallback.  Set ``SYMPROP_KERNEL=pure`` or
``SYMPROP_KERNEL=native`` to force a backend (the latter raises if the
extension is unavailable).
"""

import os

from . import _pure

_requested = os.environ.get("SYMPROP_KERNEL", "").strip().lower()

if _requested == "pure":
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "SYMPROP_KERNEL=native but the compiled extension is not built; "
                "run `python setup.py build_ext --inplace`"
            )
        _impl = _pure

BACKEND = _impl.BACKEND
msp_log_batch = _impl.msp_log_batch
msp_log_grad_batch = _impl.msp_log_grad_batch

__all__ = ["BACKEND", "msp_log_batch", "msp_log_grad_batch"]
