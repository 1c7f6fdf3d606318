"""Kernel backend selection for the common-subgraph search.

The compiled Cython kernel is preferred when its extension module has been
built; otherwise the pure-Python twin is used.  Both implement the same
contract and return identical results.  Set ``TEMPLATER_PURE_PYTHON=1`` to
force the fallback, for debugging or benchmarking.
"""

import os

from templater.kernels import _mcs_py

if os.environ.get("TEMPLATER_PURE_PYTHON"):
    _impl = _mcs_py
    BACKEND = "python"
else:
    try:
        from templater.kernels import _mcs_cy as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _mcs_py
        BACKEND = "python"

max_common_connected_subgraph = _impl.max_common_connected_subgraph

pure_python_kernel = _mcs_py.max_common_connected_subgraph

__all__ = ["max_common_connected_subgraph", "pure_python_kernel", "BACKEND"]
