"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``TOPOCUT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
coreduce_pairs = _kernels_py.coreduce_pairs

if os.environ.get("TOPOCUT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _ext
    except ImportError:  # extension not built
        _ext = None
    if _ext is not None:
        coreduce_pairs = _ext.coreduce_pairs
        BACKEND = "cython"

__all__ = ["coreduce_pairs", "BACKEND"]
