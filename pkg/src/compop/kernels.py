"""Backend selection for the hot kernels.

The compiled extension ``compop._ckernels`` is used when it imports and the
environment variable ``COMPOP_PURE_PYTHON`` is unset; otherwise the NumPy
implementations in ``compop._kernels_py`` are used.
"""
import os

from . import _kernels_py

BACKEND = "python"
aberth_batch = _kernels_py.aberth_batch

if not os.environ.get("COMPOP_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:  # pragma: no cover - depends on build
        _ckernels = None
    else:
        aberth_batch = _ckernels.aberth_batch
        BACKEND = "cython"


def backends():
    """Mapping of available backend names to their ``aberth_batch``."""
    out = {"python": _kernels_py.aberth_batch}
    try:
        from . import _ckernels as ck
    except ImportError:  # pragma: no cover
        return out
    out["cython"] = ck.aberth_batch
    return out
