"""Backend switch for the hot loops.

Set ``FRAMELAB_NUMBA=0`` in the environment to force the pure-numpy paths.
"""

from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("FRAMELAB_NUMBA", "1").lower() not in ("0", "false", "no", "off")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, cache=True, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
