"""Hot kernels: compiled Cython core with a pure-Python fallback.

The backend is chosen once at import. Set ``MTERM_LAB_PURE_PYTHON=1`` to
force the fallback even when the extension is built.

Kernels
-------
segment_argmin
    Line search of an l_p norm along a segment (relaxed greedy step).
farthest_point_traversal
    Gonzalez covering/packing traversal used by the entropy brackets.
modulus_ascent
    Coordinate ascent for lower estimates of the modulus of smoothness.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MTERM_LAB_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"

segment_argmin = _impl.segment_argmin
farthest_point_traversal = _impl.farthest_point_traversal
modulus_ascent = _impl.modulus_ascent


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


__all__ = [
    "BACKEND",
    "available_backends",
    "farthest_point_traversal",
    "modulus_ascent",
    "segment_argmin",
]
