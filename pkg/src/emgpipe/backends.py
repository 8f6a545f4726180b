"""Kernel backend selection.

The wavelet and forest kernels exist twice: numba-compiled loops and a
plain numpy fallback. The compiled path is used whenever numba imports
cleanly; setting EMGPIPE_DISABLE_NUMBA=1 in the environment forces the
numpy path. Tests and benchmarks can pin a backend with set_backend.
"""

import os

from . import _kernels_np

_active = None
_active_name = None


def _pick_default():
    if os.environ.get("EMGPIPE_DISABLE_NUMBA", "") == "1":
        return _kernels_np, "numpy"
    try:
        from . import _kernels_nb
    except Exception:
        return _kernels_np, "numpy"
    return _kernels_nb, "numba"


def get_backend():
    """The active kernel module (resolved once, then cached)."""
    global _active, _active_name
    if _active is None:
        _active, _active_name = _pick_default()
    return _active


def backend_name():
    get_backend()
    return _active_name


def set_backend(name):
    """Pin the kernel backend to 'numpy' or 'numba'."""
    global _active, _active_name
    if name == "numpy":
        _active, _active_name = _kernels_np, "numpy"
    elif name == "numba":
        from . import _kernels_nb
        _active, _active_name = _kernels_nb, "numba"
    else:
        raise ValueError("backend must be 'numpy' or 'numba', got %r" % (name,))
    return _active
