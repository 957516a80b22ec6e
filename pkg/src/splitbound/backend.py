"""Kernel backend selection.

The hot numeric kernels in :mod:`splitbound._kernels` are written against the
numba-supported numpy subset.  When numba is importable and the environment
variable ``SPLITBOUND_DISABLE_NUMBA`` is unset (or not one of ``1/true/yes``),
they are jit-compiled; otherwise the very same functions run as plain numpy.
Both paths compute identical results; ``benchmarks/bench_kernels.py`` times
them against each other.
"""

from __future__ import annotations

import os


def _numba_enabled() -> bool:
    flag = os.environ.get("SPLITBOUND_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_enabled()


def jit_kernel(fn):
    """Return fn jit-compiled when the numba backend is enabled, else fn."""
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(fn)
    return fn
