"""Numba dispatch.

Kernels in :mod:`parisian._kernels` come in pairs: a ``*_jit`` loop version
compiled with numba and a ``*_np`` version written with plain numpy. The numpy
versions are dtype-generic, so they also serve the exact-rational mode
(object arrays holding :class:`fractions.Fraction`).

``PARISIAN_JIT=0`` forces the numpy path even when numba is importable.
``PARISIAN_THREADS`` caps the numba thread pool.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

NUMBA_AVAILABLE = numba is not None
if numba is not None and "NUMBA_THREADING_LAYER" not in os.environ:
    # old TBB builds only produce a warning; try the others first
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
_threads_configured = False


def jit_enabled() -> bool:
    flag = os.environ.get("PARISIAN_JIT", "1").strip().lower()
    return NUMBA_AVAILABLE and flag not in ("0", "false", "no", "off")


def _configure_threads() -> None:
    global _threads_configured
    if _threads_configured or numba is None:
        return
    _threads_configured = True
    raw = os.environ.get("PARISIAN_THREADS")
    if raw:
        n = max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)


def use_jit(*arrays: np.ndarray) -> bool:
    """True when the compiled kernel may run on these arrays (float64 only)."""
    if not jit_enabled():
        return False
    if any(a.dtype != np.float64 for a in arrays):
        return False
    _configure_threads()
    return True


def njit(*args, **kwargs):
    """``numba.njit(cache=True)``; a no-op decorator when numba is missing."""
    if numba is None:  # pragma: no cover
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


if numba is not None:
    prange = numba.prange
else:  # pragma: no cover
    prange = range
