"""Compensated reductions.

Host-side sums go through :func:`math.fsum`, which accumulates with
error-free transformations and returns the correctly rounded result, so the
answer does not depend on the order of the terms. The jitted kernels use
Neumaier's variant of Kahan summation in a fixed order.
"""

import math

import numpy as np
from numba import njit


def csum(values):
    """Correctly rounded sum of a real sequence or array."""
    return math.fsum(np.asarray(values, dtype=np.float64).ravel())


def csum_complex(values):
    arr = np.asarray(values, dtype=np.complex128).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


@njit(cache=True, inline="always")
def neumaier_add(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c
