"""Numba-jitted twins of the kernels in ``_kernels_numpy``.

Rays are independent, so rows are distributed across threads with prange;
each pixel is written exactly once and per-ray accumulation runs in
ascending sample order, which keeps output bits identical for any worker
count.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from numba import NumbaWarning, njit, prange

# numba warns about old TBB builds while picking a threading layer; it
# falls back cleanly, and the noise would pollute the CLI's stderr contract
warnings.filterwarnings("ignore", category=NumbaWarning, message=".*TBB.*")

_JIT = {"cache": True, "parallel": True, "fastmath": False}


@njit(**_JIT)
def opacity_kernel(origin, dirs, rot, center, inv_ca, scale, near, delta, n):
    h, w, _ = dirs.shape
    opacity = np.zeros((h, w))
    for py in prange(h):
        for px in range(w):
            dx, dy, dz = dirs[py, px, 0], dirs[py, px, 1], dirs[py, px, 2]
            optical = 0.0
            acc = 0.0
            for k in range(1, n + 1):
                t = near + (k - 0.5) * delta
                ox = origin[0] + t * dx - center[0]
                oy = origin[1] + t * dy - center[1]
                oz = origin[2] + t * dz - center[2]
                dist = 0.0
                for j in range(3):
                    lj = ox * rot[0, j] + oy * rot[1, j] + oz * rot[2, j]
                    dist += lj * lj * inv_ca[j]
                x = scale - dist
                if x >= 0.0:
                    sig = 1.0 / (1.0 + math.exp(-x))
                else:
                    e = math.exp(x)
                    sig = e / (1.0 + e)
                acc += math.exp(-optical) * (1.0 - math.exp(-sig * delta))
                optical += sig * delta
            opacity[py, px] = acc
    return opacity


@njit(**_JIT)
def grad_opacity_kernel(origin, dirs, rot, drot, center, inv_ca, aspect,
                        scale, near, delta, n, upstream):
    h, w, _ = dirs.shape
    grads = np.zeros((h, w, 10))
    for py in prange(h):
        for px in range(w):
            dx, dy, dz = dirs[py, px, 0], dirs[py, px, 1], dirs[py, px, 2]
            optical = 0.0
            g = np.zeros(10)
            for k in range(1, n + 1):
                t = near + (k - 0.5) * delta
                ox = origin[0] + t * dx - center[0]
                oy = origin[1] + t * dy - center[1]
                oz = origin[2] + t * dz - center[2]
                local = np.empty(3)
                q = np.empty(3)
                dist = 0.0
                for j in range(3):
                    lj = ox * rot[0, j] + oy * rot[1, j] + oz * rot[2, j]
                    local[j] = lj
                    q[j] = lj * inv_ca[j]
                    dist += lj * q[j]
                x = scale - dist
                if x >= 0.0:
                    sig = 1.0 / (1.0 + math.exp(-x))
                else:
                    e = math.exp(x)
                    sig = e / (1.0 + e)
                wk = sig * (1.0 - sig)
                optical += sig * delta
                for i in range(3):
                    g[i] += wk * 2.0 * (rot[i, 0] * q[0] + rot[i, 1] * q[1] + rot[i, 2] * q[2])
                g[3] += wk
                for m in range(3):
                    g[4 + m] += wk * local[m] * q[m] / aspect[m]
                for m in range(3):
                    s = 0.0
                    for j in range(3):
                        du = ox * drot[m, 0, j] + oy * drot[m, 1, j] + oz * drot[m, 2, j]
                        s += q[j] * du
                    g[7 + m] += wk * (-2.0 * s)
            scalefac = upstream[py, px] * delta * math.exp(-optical)
            for i in range(10):
                grads[py, px, i] = g[i] * scalefac
    return grads
