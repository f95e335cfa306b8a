"""Numba switch for the hot loops.

Set ``BEAMLEARN_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
Kernels are written so both paths produce bit-identical results.
"""

from __future__ import annotations

import os

NUMBA_OPTS = {"cache": True, "nogil": True}


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and not _flag("BEAMLEARN_DISABLE_NUMBA")


def njit(func):
    """Compile ``func`` with numba when enabled; otherwise return it untouched.

    The original function stays reachable as ``.py_func`` in both cases.
    """
    if not USE_NUMBA:
        func.py_func = func
        return func
    return numba.njit(**NUMBA_OPTS)(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
