"""Select the kernel backend at import time.

The compiled extension is preferred when present; CGCLUSTER_BACKEND=python
forces the numpy fallback, CGCLUSTER_BACKEND=compiled makes a missing
extension a hard error (useful in benchmarks and parity tests).
"""

import os

from . import _kernels_py

_choice = os.environ.get("CGCLUSTER_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(f"CGCLUSTER_BACKEND must be auto/compiled/python, got {_choice!r}")

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME
batch_dwt_pass = _impl.batch_dwt_pass
lloyd_iter = _impl.lloyd_iter
