"""Kernel selection: the compiled extension when it imports, else pure Python."""
from __future__ import annotations

import numpy as np

from . import _pykernels

try:  # pragma: no cover - depends on the build
    from . import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

KERNELS = {"python": _pykernels}
if _ckernels is not None:
    KERNELS["compiled"] = _ckernels

DEFAULT = "compiled" if _ckernels is not None else "python"

# magnitudes the int64 kernel accepts (leaves headroom for lo + hi)
INT64_LIMIT = 2**61


def available() -> list[str]:
    return sorted(KERNELS)


def extend_branches(values: np.ndarray, dist, step, cap=None, kernel: str | None = None):
    """Dispatch to the requested kernel; object arrays always use pure Python."""
    name = kernel or DEFAULT
    if name not in KERNELS:
        raise ValueError(f"kernel {name!r} is not available (have {available()})")
    if values.dtype != np.int64:
        name = "python"
    if name == "compiled":
        return _ckernels.extend_branches(
            np.ascontiguousarray(values),
            np.ascontiguousarray(dist, dtype=np.int64),
            np.ascontiguousarray(step, dtype=np.int64),
            cap,
        )
    return _pykernels.extend_branches(values, dist, step, cap)
