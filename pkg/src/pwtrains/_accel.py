"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python twin.  ``PWTRAINS_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

if os.environ.get("PWTRAINS_PURE_PYTHON"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:  # pragma: no cover - depends on the build
        kernels = _pykernels

BACKEND = "python" if kernels is _pykernels else "cython"

POWER = _pykernels.POWER
BUMP = _pykernels.BUMP
TRAIN_TENT = _pykernels.TRAIN_TENT
TRAIN_BUMP = _pykernels.TRAIN_BUMP
INFLECTION = _pykernels.INFLECTION

__all__ = ["kernels", "BACKEND", "POWER", "BUMP", "TRAIN_TENT", "TRAIN_BUMP", "INFLECTION"]
