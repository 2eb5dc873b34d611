"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``VORTEXLAB_KERNELS=python`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("VORTEXLAB_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

plane_velocity = _impl.plane_velocity
halfplane_velocity = _impl.halfplane_velocity
restricted3_rhs = _impl.restricted3_rhs
green_fast = _impl.green_fast
green_grad_fast = _impl.green_grad_fast
green_fast_array = _impl.green_fast_array
ring_velocity = _impl.ring_velocity
dp5_step = _impl.dp5_step

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels

    BACKENDS["cython"] = _ckernels
except ImportError:
    pass
