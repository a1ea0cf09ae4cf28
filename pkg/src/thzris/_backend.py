"""Numba/numpy backend switch.

Hot kernels are compiled with numba when it is importable and the
``THZRIS_DISABLE_NUMBA`` environment variable is unset (or "0").  Setting it
to "1" routes every kernel through the vectorised numpy fallback instead.
The flag is read once, at import time.
"""

import os

_flag = os.environ.get("THZRIS_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if USE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
