"""Numba switch.

Hot kernels are written twice: a loop version compiled with ``numba.njit`` and
a vectorized numpy version.  Setting ``WAVEKRYLOV_NO_NUMBA=1`` (or numba being
unavailable) selects the numpy path everywhere.
"""
import os

_FLAG = os.environ.get("WAVEKRYLOV_NO_NUMBA", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError
    import numba

    HAVE_NUMBA = True

    def njit(func):
        return numba.njit(cache=True, nogil=True)(func)

except ImportError:
    HAVE_NUMBA = False

    def njit(func):
        return None


BACKEND = "numba" if HAVE_NUMBA else "numpy"


def pick(numba_impl, numpy_impl):
    return numba_impl if numba_impl is not None else numpy_impl
