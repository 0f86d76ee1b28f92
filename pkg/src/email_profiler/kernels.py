"""Select the tokenizer/counter implementation at import time.

The compiled ``_kernels`` extension is used when it has been built; otherwise
the pure-Python module is used. Set ``PROFILER_PURE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _kernels_py

if os.environ.get("PROFILER_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

tokenize = _impl.tokenize
count_hits = _impl.count_hits
