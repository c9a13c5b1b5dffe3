"""Optional numba acceleration for the hot kernels.

Every kernel is written as plain Python over scalars and numpy arrays, then
wrapped with ``numba.njit`` when numba is importable and the environment
variable ``CORECHASE_DISABLE_NUMBA`` is unset (or ``0``).  With the flag set
the exact same source runs in the interpreter, which is slow but useful for
debugging and for cross-checking the compiled path.

Compiled kernels are cached on disk.  numba only invalidates a cache entry
when its own source file changes, so after editing a kernel that others
inline, delete the ``*.nbi``/``*.nbc`` files under ``__pycache__``.
"""

import os

_flag = os.environ.get("CORECHASE_DISABLE_NUMBA", "0").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(func=None, **options):
    """``numba.njit(cache=True)`` or the identity, depending on the flag."""
    def wrap(f):
        if USE_NUMBA:
            return numba.njit(cache=True, **options)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def backend():
    return "numba" if USE_NUMBA else "python"
