"""Optional numba acceleration.

Set ``HOLEFREE_DISABLE_NUMBA=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``)
to force the pure numpy/Python fallbacks.
"""
import os

_disabled = os.environ.get("HOLEFREE_DISABLE_NUMBA", "0") not in ("", "0")

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = os.environ.get("NUMBA_DISABLE_JIT", "0") in ("", "0")
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if numba is not None and not _disabled:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


# int64 kernels are only used when every intermediate fits comfortably
INT64_SAFE_BITS = 30
