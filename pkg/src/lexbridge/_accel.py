"""Optional numba acceleration for the hot kernels.

Kernels are written in the subset of Python/numpy that numba compiles in
nopython mode. Setting ``LEXBRIDGE_DISABLE_NUMBA=1`` (or running without
numba installed) leaves them as plain Python functions over numpy arrays,
which gives identical results, only slower.
"""
import functools
import os


def numba_disabled(value):
    return str(value).strip().lower() in ("1", "true", "yes", "on")


try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None

HAVE_NUMBA = _nb is not None
USE_NUMBA = HAVE_NUMBA and not numba_disabled(os.environ.get("LEXBRIDGE_DISABLE_NUMBA", ""))


def njit(func=None, **kwargs):
    """``numba.njit`` with project defaults, or identity when disabled."""
    if func is None:
        return functools.partial(njit, **kwargs)
    if not USE_NUMBA:
        return func
    opts = {"cache": True, "nogil": True}
    opts.update(kwargs)
    return _nb.njit(**opts)(func)


def backend():
    return "numba" if USE_NUMBA else "python"
