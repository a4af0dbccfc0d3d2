"""Backend selection for the quadrature kernels.

The compiled extension is used when it imports; set ``FOLCALC_PURE_PYTHON=1``
to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("FOLCALC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

pairwise_sum = _impl.pairwise_sum
minor_values = _impl.minor_values
minor_abs_sums = _impl.minor_abs_sums

__all__ = ["BACKEND", "pairwise_sum", "minor_values", "minor_abs_sums", "python_backend"]


def python_backend():
    """The fallback module, for side-by-side comparison and benchmarks."""
    return _kernels_py
