"""Backend selection for the hot kernels.

Numba is used when importable unless ``QPYRAMID_DISABLE_NUMBA`` is set to a
truthy value, in which case the vectorized numpy implementations run instead.
"""
import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def deco(fn):
            return fn

        return deco


def _flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _flag("QPYRAMID_DISABLE_NUMBA")

__all__ = ["njit", "HAVE_NUMBA", "USE_NUMBA"]
