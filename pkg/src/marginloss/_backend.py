"""Select the compiled kernels when importable, else the numpy fallback.

Set ``MARGINLOSS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

python_kernels = _fallback
compiled_kernels = None

if not os.environ.get("MARGINLOSS_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_kernels
    except ImportError:
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "compiled" if compiled_kernels is not None else "python"

__all__ = ["kernels", "python_kernels", "compiled_kernels", "BACKEND"]
