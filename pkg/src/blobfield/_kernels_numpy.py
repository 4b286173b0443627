"""Pure-numpy implementations of the ray-marching hot kernels.

Vectorized over pixels with a sequential loop over samples, so per-ray
accumulation order (ascending sample index) matches the scalar reference
and the numba twin in ``_kernels_numba``.

Layout of the 10 geometric parameters everywhere:
``[center_x, center_y, center_z, scale, aspect_1..3, euler_1..3]``.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument only; no overflow in either tail
    z = np.exp(-np.abs(x))
    return np.where(x >= 0.0, 1.0 / (1.0 + z), z / (1.0 + z))


def opacity_kernel(origin, dirs, rot, center, inv_ca, scale, near, delta, n):
    """Front-to-back accumulated opacity per pixel, shape (H, W)."""
    h, w, _ = dirs.shape
    opacity = np.zeros((h, w))
    optical = np.zeros((h, w))
    for k in range(1, n + 1):
        t = near + (k - 0.5) * delta
        pts = origin[None, None, :] + t * dirs
        local = (pts - center[None, None, :]) @ rot
        dist = (local * local) @ inv_ca
        sig = _sigmoid(scale - dist)
        opacity += np.exp(-optical) * (1.0 - np.exp(-sig * delta))
        optical += sig * delta
    return opacity


def grad_opacity_kernel(origin, dirs, rot, drot, center, inv_ca, aspect,
                        scale, near, delta, n, upstream):
    """Per-pixel parameter-gradient contributions, shape (H, W, 10).

    The caller reduces over pixels; keeping the reduction outside the kernel
    makes the summation order independent of worker count.
    """
    h, w, _ = dirs.shape
    grads = np.zeros((h, w, 10))
    optical = np.zeros((h, w))
    for k in range(1, n + 1):
        t = near + (k - 0.5) * delta
        pts = origin[None, None, :] + t * dirs
        offset = pts - center[None, None, :]
        local = offset @ rot
        q = local * inv_ca[None, None, :]
        dist = (local * q).sum(axis=-1)
        sig = _sigmoid(scale - dist)
        wk = sig * (1.0 - sig)
        optical += sig * delta
        # d(scale - dist)/d(center) = +2 R q
        grads[:, :, 0:3] += wk[:, :, None] * (2.0 * (q @ rot.T))
        grads[:, :, 3] += wk
        # d(scale - dist)/d(aspect_m) = +local_m^2 * inv_ca_m / aspect_m
        grads[:, :, 4:7] += wk[:, :, None] * (local * q / aspect[None, None, :])
        # d(scale - dist)/d(euler_m) = -2 sum_j q_j (dR_m^T offset)_j
        for m in range(3):
            grads[:, :, 7 + m] += wk * (-2.0 * ((offset @ drot[m]) * q).sum(axis=-1))
    grads *= (upstream * delta * np.exp(-optical))[:, :, None]
    return grads
