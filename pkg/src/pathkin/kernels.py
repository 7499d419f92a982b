"""Backend selection for the hot kernels.

The compiled extension ``pathkin._core`` is used when it imports; otherwise
the numpy implementation in ``pathkin._pycore`` takes over.  Setting
``PATHKIN_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pycore

BACKEND = "python"
_impl = _pycore

if os.environ.get("PATHKIN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pycore

contract_connection = _impl.contract_connection
rk4_propagate = _impl.rk4_propagate
simpson_transported = _impl.simpson_transported


def available_backends():
    """Map backend name -> kernel module, for benchmarks and cross-checks."""
    found = {"python": _pycore}
    try:
        from . import _core

        found["cython"] = _core
    except ImportError:
        pass
    return found
