"""Pointwise blob math: rotations, covariance, Mahalanobis distance, density.

All functions are pure and operate on plain floats and small numpy arrays,
so they double as the scalar reference for the vectorized render kernels.
"""

from __future__ import annotations

import math

import numpy as np

from .scene import Blob


def rotation_from_euler(euler) -> np.ndarray:
    """3x3 rotation for Euler angles (alpha, beta, gamma).

    Convention: extrinsic X-then-Y-then-Z, i.e. R = Rz(gamma) Ry(beta) Rx(alpha).
    """
    a, b, c = (float(v) for v in euler)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    cc, sc = math.cos(c), math.sin(c)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    rz = np.array([[cc, -sc, 0.0], [sc, cc, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry @ rx


def rotation_derivatives(euler) -> np.ndarray:
    """Stack (3, 3, 3) of dR/d(alpha), dR/d(beta), dR/d(gamma)."""
    a, b, c = (float(v) for v in euler)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    cc, sc = math.cos(c), math.sin(c)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    rz = np.array([[cc, -sc, 0.0], [sc, cc, 0.0], [0.0, 0.0, 1.0]])
    drx = np.array([[0.0, 0.0, 0.0], [0.0, -sa, -ca], [0.0, ca, -sa]])
    dry = np.array([[-sb, 0.0, cb], [0.0, 0.0, 0.0], [-cb, 0.0, -sb]])
    drz = np.array([[-sc, -cc, 0.0], [cc, -sc, 0.0], [0.0, 0.0, 0.0]])
    return np.stack([rz @ ry @ drx, rz @ dry @ rx, drz @ ry @ rx])


def blob_covariance(euler, aspect, sharpness: float) -> np.ndarray:
    """World-frame covariance R (c * diag(aspect)) R^T."""
    r = rotation_from_euler(euler)
    sigma = float(sharpness) * np.diag(np.asarray(aspect, dtype=np.float64))
    return r @ sigma @ r.T


def mahalanobis_sq(point, center, euler, aspect, sharpness: float) -> float:
    """Squared Mahalanobis distance of ``point`` from an ellipsoid blob.

    Evaluated via the rotated-diagonal closed form
    ``sum_k (R^T (p - center))_k^2 / (sharpness * aspect_k)``;
    no matrix inverse is formed.
    """
    r = rotation_from_euler(euler)
    delta = np.asarray(point, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    local = r.T @ delta
    denom = float(sharpness) * np.asarray(aspect, dtype=np.float64)
    return float(np.sum(local * local / denom))


def sigmoid(x: float) -> float:
    """Numerically stable logistic function."""
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def density(point, blob: Blob, sharpness: float) -> float:
    """Blob density sigmoid(scale - mahalanobis_sq) in (0, 1).

    Inactive blobs contribute exactly 0 so downstream compositing needs no
    special cases.
    """
    if not blob.active:
        return 0.0
    d = mahalanobis_sq(point, blob.center, blob.euler, blob.aspect, sharpness)
    return sigmoid(blob.scale - d)
