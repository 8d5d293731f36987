"""Hot loop for discretized matrix Stieltjes recurrences.

The compiled extension ``_stieltjes`` is used when it was built; otherwise
the numpy implementation in ``_stieltjes_py`` is selected.  Setting the
environment variable ``BOCHNER_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _stieltjes_py

BACKEND = "python"
stieltjes = _stieltjes_py.stieltjes

if os.environ.get("BOCHNER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _stieltjes as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        stieltjes = _compiled.stieltjes
        BACKEND = "cython"

__all__ = ["stieltjes", "BACKEND"]
