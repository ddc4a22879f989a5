"""Kernel backend selection: compiled extension if built, numpy fallback otherwise.

Set COREGAE_PURE_PYTHON=1 to force the fallback (used by the benchmark and
for debugging); ``backend()`` reports which one is active.
"""

import os

if os.environ.get("COREGAE_PURE_PYTHON"):
    from . import _pykern as _impl

    _BACKEND = "python"
else:
    try:
        from . import _ckern as _impl

        _BACKEND = "compiled"
    except ImportError:
        from . import _pykern as _impl

        _BACKEND = "python"

peel_cores = _impl.peel_cores
csr_spmm = _impl.csr_spmm
sigmoid_softplus_inplace = _impl.sigmoid_softplus_inplace


def backend():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _BACKEND
