"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise (or when
``TRENDLAB_PURE_PYTHON`` is set to a non-empty value) the numpy fallback is
used.  Both produce identical results.
"""
import os

from . import _fallback

if os.environ.get("TRENDLAB_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "cython" if _impl is not _fallback else "numpy"

simulate_counts = _impl.simulate_counts
exact_pmf = _impl.exact_pmf

__all__ = ["BACKEND", "simulate_counts", "exact_pmf"]
