"""Kernel selection: the compiled extension when it is importable, the
pure-Python module otherwise. Set ``CQA2_PURE_PYTHON=1`` to force the latter."""
import os

from . import _kernels_py

if os.environ.get("CQA2_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

find_falsifying = _impl.find_falsifying
delta_dense = _impl.delta_dense
