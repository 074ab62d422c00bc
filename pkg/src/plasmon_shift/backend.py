"""Kernel backend selection and thread-count control.

``PLASMON_SHIFT_BACKEND`` picks the hot-kernel implementation:

* ``numba`` (default when numba imports) — compiled kernels with parallel
  grid loops;
* ``numpy`` — pure-numpy fallback, same semantics, no compilation.

``PLASMON_SHIFT_THREADS`` caps the parallelism of the compiled path.
``benchmarks/bench_backends.py`` times the two side by side.
"""

import os
import warnings

from . import _kernels_numpy

_ENV_BACKEND = "PLASMON_SHIFT_BACKEND"
_ENV_THREADS = "PLASMON_SHIFT_THREADS"


def _select():
    choice = os.environ.get(_ENV_BACKEND, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_BACKEND} must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return _kernels_numpy, "numpy"
    try:
        import numba

        from . import _kernels_numba
    except ImportError:
        if choice == "numba":
            raise
        warnings.warn("numba unavailable; falling back to the numpy kernels")
        return _kernels_numpy, "numpy"
    cap = os.environ.get(_ENV_THREADS, "").strip()
    if cap:
        try:
            requested = max(1, int(cap))
        except ValueError:
            raise ValueError(f"{_ENV_THREADS} must be an integer, got {cap!r}")
        numba.set_num_threads(min(requested, numba.config.NUMBA_NUM_THREADS))
    return _kernels_numba, "numba"


kernels, BACKEND = _select()
