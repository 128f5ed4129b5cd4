"""Hot-loop dispatch: the compiled extension when it imports, numpy otherwise.

Set SIEGEL_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SIEGEL_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]

        _impl = _compiled
        BACKEND = "cython"
    except ImportError:
        pass

column_scan = _impl.column_scan
column_solutions = _impl.column_solutions
coset_histogram = _impl.coset_histogram

__all__ = ["BACKEND", "column_scan", "column_solutions", "coset_histogram"]
