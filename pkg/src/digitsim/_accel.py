"""Backend switch for the hot kernels.

Numba is used when importable unless ``DIGITSIM_NUMBA`` is set to ``0``,
``false`` or ``no``. The pure-numpy kernels are always importable and are
the reference the compiled ones are tested against.
"""

import os

_OFF = {"0", "false", "no", "off"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("DIGITSIM_NUMBA", "1").strip().lower() not in _OFF


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
