# Services/accel.py
try:
    import numba as nb

    JIT_DISABLED = False
except ImportError:
    JIT_DISABLED = True


def njit(*args, **kwargs):
    """numba.njit when numba is importable, otherwise a pass-through decorator."""
    if not JIT_DISABLED:
        return nb.njit(*args, **kwargs)
    else:
        return lambda func: func
