"""Selection between numba-compiled kernels and the pure Python/numpy path.

Set ``DIVLAB_DISABLE_NUMBA=1`` to run every kernel without compilation.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("DIVLAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by DIVLAB_DISABLE_NUMBA")
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

NUMBA_ENABLED = _numba is not None


def jit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise.

    The undecorated function stays reachable as ``.py_func`` in both cases so
    benchmarks and equivalence tests can call the interpreted version.
    """
    if _numba is None:
        func.py_func = func
        return func
    return _numba.njit(cache=True)(func)
