"""Pick the kernel implementation once, at import time.

The compiled extension is used when it was built; setting the environment
variable ``SOLVDIFF_PURE_PYTHON=1`` forces the interpreted fallback.
"""

import os

if os.environ.get("SOLVDIFF_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
