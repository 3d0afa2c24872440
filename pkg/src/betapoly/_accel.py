"""Kernel compilation switch: numba when available, pure Python otherwise.

Every hot numeric loop in this package lives in :mod:`betapoly._kernels` as a
plain function decorated with :func:`maybe_njit`. With numba importable (the
default install) the functions are compiled; setting the environment variable
``BETAPOLY_DISABLE_NUMBA=1`` before import, or running without numba, selects
the identical pure-Python/numpy fallback. All randomness stays in numpy, so
simulation results are bit-identical on both paths; quadrature values can
move by a last ulp or two because compiled transcendentals round differently
from the C library. ``benchmarks/bench_kernels.py`` measures the speed gap
and enforces those agreement bounds.
"""

import os

_TRUTHY = ("1", "true", "yes", "on")


def _numba_requested() -> bool:
    flag = os.environ.get("BETAPOLY_DISABLE_NUMBA", "").strip().lower()
    return flag not in _TRUTHY


USING_NUMBA = False
if _numba_requested():
    try:
        import numba as _numba

        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


def maybe_njit(func=None, **kwargs):
    """Apply numba.njit when enabled, otherwise return the function as is.

    Usable bare (``@maybe_njit``) or with njit keyword arguments
    (``@maybe_njit(cache=True)``).
    """
    def wrap(f):
        if USING_NUMBA:
            return _numba.njit(f, **kwargs)
        return f

    if func is not None:
        return wrap(func)
    return wrap
