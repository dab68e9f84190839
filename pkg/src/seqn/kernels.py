"""Backend selection for the numeric kernels.

The compiled extension is preferred when it imports; SEQN_PURE_PYTHON=1
forces the numpy fallback (useful for debugging and for the backend
comparison benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("SEQN_PURE_PYTHON", "") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.backend_name()

soft_threshold = _impl.soft_threshold
csr_margins = _impl.csr_margins
csr_accumulate_rows = _impl.csr_accumulate_rows
csr_row_sq_norms = _impl.csr_row_sq_norms


def available_backends():
    """Name -> module for every backend importable in this environment."""
    impls = {"python": _kernels_py}
    try:
        from . import _kernels

        impls["compiled"] = _kernels
    except ImportError:
        pass
    return impls
