"""Numba switch.

Kernels are compiled with numba when it is importable and the environment
variable ``LCOAREA_DISABLE_NUMBA`` is not set to a truthy value. Otherwise
the pure-numpy implementations are used. Both paths are always importable
so tests and benchmarks can compare them directly.
"""

import os

_FALSE = ("", "0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("LCOAREA_DISABLE_NUMBA", "").lower() in _FALSE


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or an identity decorator without numba."""
    if not NUMBA_AVAILABLE:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def thread_cap():
    """Worker cap from ``LCOAREA_THREADS`` (default 1, floor 1)."""
    raw = os.environ.get("LCOAREA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
