"""Numba switch.

Set ``CONVEXCR_DISABLE_NUMBA=1`` to force the pure numpy/scipy kernels.
"""
import os

_DISABLED_BY_ENV = os.environ.get("CONVEXCR_DISABLE_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on")

try:
    import numba as nb
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    nb = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED_BY_ENV


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
