"""Select the kernel implementation at import time.

Set ``SPARSEPHASE_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

if os.environ.get("SPARSEPHASE_PURE_PYTHON"):
    from . import _pykernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND
