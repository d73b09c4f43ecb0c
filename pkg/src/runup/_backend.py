"""Kernel backend selection.

Set ``RUNUP_DISABLE_NUMBA=1`` to force the pure-numpy kernels (also used
automatically when numba cannot be imported). ``RUNUP_NUM_THREADS`` caps the
numba thread pool.
"""
import os

USE_NUMBA = os.environ.get("RUNUP_DISABLE_NUMBA", "0").strip().lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba

        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
        from runup import _kernels_numba as kernels

        _threads = os.environ.get("RUNUP_NUM_THREADS")
        if _threads:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if not USE_NUMBA:
    from runup import _kernels_numpy as kernels

BACKEND = "numba" if USE_NUMBA else "numpy"

__all__ = ["kernels", "BACKEND", "USE_NUMBA"]
