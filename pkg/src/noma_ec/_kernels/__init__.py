"""Monte Carlo kernel backends.

Two interchangeable implementations of the hot inner loops (gain
transform+sort, column evaluation): a compiled Cython extension and a pure
NumPy fallback. The extension is preferred when importable; set
NOMA_EC_FORCE_FALLBACK=1 to force the NumPy path. Both consume identical
uniform streams and agree to ~1e-12 relative (not bit-for-bit: libm vs
NumPy SIMD rounding); per-backend results are exactly reproducible.
"""
import os

from . import _mc_fallback

if os.environ.get("NOMA_EC_FORCE_FALLBACK") == "1":
    backend = _mc_fallback
else:
    try:
        from . import _mc as backend  # type: ignore[no-redef]
    except ImportError:
        backend = _mc_fallback

BACKEND_NAME = backend.NAME

sorted_gains = backend.sorted_gains
eval_columns = backend.eval_columns

__all__ = ["backend", "BACKEND_NAME", "sorted_gains", "eval_columns",
           "_mc_fallback"]
