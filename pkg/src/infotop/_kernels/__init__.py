"""Set-cover kernels with a compiled core and a pure-Python fallback.

The compiled module is used when it imports; setting the environment
variable ``INFOTOP_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _setcover_py as python_backend

compiled_backend = None
if os.environ.get("INFOTOP_PURE_PYTHON", "") != "1":
    try:
        from . import _setcover as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

min_set_cover = backend.min_set_cover
covering_subsets = backend.covering_subsets

__all__ = ["BACKEND", "min_set_cover", "covering_subsets", "python_backend", "compiled_backend"]
