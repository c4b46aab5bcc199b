"""Kernel backend selection: compiled extension if available, numpy fallback
otherwise. ``backend()`` reports which one is active."""

try:
    from . import _kernels as _impl
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl

sgd_sweep = _impl.sgd_sweep


def backend():
    return _impl.BACKEND
