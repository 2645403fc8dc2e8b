"""Kernel selection: compiled Cython core if importable, else pure Python.

Set ``RANKCAPRA_PURE=1`` before import to force the fallback.
"""

import os

if os.environ.get("RANKCAPRA_PURE", "") in ("", "0"):
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

        BACKEND = "python"
else:
    from . import _kernels_py as kernels

    BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
