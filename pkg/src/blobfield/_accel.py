"""Kernel dispatch: numba-jitted hot loops with a pure-numpy fallback.

The numba path is used when importable; set ``BLOBFIELD_NO_NUMBA=1`` to
force the numpy path. Both paths are individually deterministic; see
``benchmarks/benchmark_kernels.py`` for a speed comparison.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("BLOBFIELD_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from . import _kernels_numba as _impl

        USING_NUMBA = True
    except ImportError:
        from . import _kernels_numpy as _impl

        USING_NUMBA = False
else:
    from . import _kernels_numpy as _impl

    USING_NUMBA = False

opacity_kernel = _impl.opacity_kernel
grad_opacity_kernel = _impl.grad_opacity_kernel


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def set_threads(count: int) -> int:
    """Cap render workers; returns the effective thread count.

    Output bytes never depend on this value: pixels are written to fixed
    locations and per-ray accumulation order is fixed.
    """
    if count < 1:
        count = 1
    if not USING_NUMBA:
        return 1
    import numba

    effective = min(count, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(effective)
    return effective
