"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Setting ``SPADE_DECLIP_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SPADE_DECLIP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

hard_threshold_half = _impl.hard_threshold_half
project_gamma_codes = _impl.project_gamma_codes


def available_backends():
    """Return a mapping of backend name to kernel module for every importable backend."""
    backends = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
