"""Shifted moments of the Riemann zeta function and the prime-sum machinery
used to bound them."""

import os

__version__ = "0.1.0"


def _pick_threading_layer():
    # the default layer probes TBB first and warns when the installed TBB is
    # too old; prefer OpenMP when it is present and nothing was requested
    if os.environ.get("NUMBA_THREADING_LAYER"):
        return
    try:
        from numba.np.ufunc import omppool  # noqa: F401
    except ImportError:
        return
    import numba

    numba.config.THREADING_LAYER = "omp"


_pick_threading_layer()
