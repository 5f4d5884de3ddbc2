"""JIT dispatch for the hot numerical kernels.

Every performance-critical loop in this package is written twice-in-one:
the function body is plain numpy-compatible Python, and ``maybe_njit``
either compiles it with numba or returns it untouched.  Setting the
environment variable ``SDSCHED_NO_NUMBA=1`` (before import) selects the
pure-Python path; ``benchmarks/bench_accel.py`` times both.
"""

import os

NO_NUMBA_ENV = "SDSCHED_NO_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(NO_NUMBA_ENV, "0") not in ("1", "true", "yes")


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when acceleration is on, identity decorator otherwise.

    Usable both bare (``@maybe_njit``) and with options
    (``@maybe_njit(cache=True)``).
    """
    if args and callable(args[0]) and not kwargs:
        func = args[0]
        if NUMBA_ENABLED:
            return _njit(cache=True, nogil=True)(func)
        return func

    def wrap(func):
        if NUMBA_ENABLED:
            opts = {"cache": True, "nogil": True}
            opts.update(kwargs)
            return _njit(**opts)(func)
        return func

    return wrap
