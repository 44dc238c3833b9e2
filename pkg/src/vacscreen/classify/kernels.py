"""Kernel engine selection.

The compiled extension is used when it imported cleanly; otherwise (or when
``VACSCREEN_PURE_PYTHON`` is set) the numpy fallback takes over. Both expose
the same two functions and pick identical splits; ``benchmarks/`` compares
their speed.
"""

from __future__ import annotations

import os

from . import _split_py

try:
    from . import _split_ext  # type: ignore[attr-defined]
except ImportError:
    _split_ext = None

if _split_ext is not None and not os.environ.get("VACSCREEN_PURE_PYTHON"):
    _impl = _split_ext
    ENGINE = "compiled"
else:
    _impl = _split_py
    ENGINE = "python"

best_split_grad_hess = _impl.best_split_grad_hess
best_split_gini = _impl.best_split_gini


def engine() -> str:
    """Name of the active kernel engine ("compiled" or "python")."""
    return ENGINE
