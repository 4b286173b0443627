"""Per-blob volume rendering: opacity maps, feature maps, opacity pyramid.

The opacity of one blob along a ray is accumulated front to back,
``O = sum_k T_k (1 - exp(-sigma_k delta_k))`` with
``T_k = exp(-sum_{j<k} sigma_j delta_j)``, which telescopes to
``1 - exp(-sum_k sigma_k delta_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _accel
from .camera import Camera, Ray, ray_grid
from .errors import IndivisibleResolution, InvalidArgument
from .geometry import mahalanobis_sq, rotation_from_euler, sigmoid
from .scene import Blob

DEFAULT_SAMPLES_PER_RAY = 32


@dataclass(frozen=True)
class SamplingConfig:
    near: float
    far: float
    samples_per_ray: int = DEFAULT_SAMPLES_PER_RAY

    def __post_init__(self):
        if not (0.0 < self.near < self.far):
            raise InvalidArgument(f"need 0 < near < far, got [{self.near}, {self.far}]")
        if self.samples_per_ray < 2:
            raise InvalidArgument(f"samples_per_ray must be >= 2, got {self.samples_per_ray}")

    @property
    def delta(self) -> float:
        """Uniform inter-sample spacing, also assigned to the last sample."""
        return (self.far - self.near) / self.samples_per_ray


def default_sampling(camera: Camera, samples_per_ray: int = DEFAULT_SAMPLES_PER_RAY) -> SamplingConfig:
    """Integration bounds covering the unit cube from an orbit camera."""
    return SamplingConfig(camera.radius - 1.0, camera.radius + 1.0, samples_per_ray)


def sample_ray(ray: Ray, cfg: SamplingConfig, rng: np.random.Generator | None = None):
    """Sample distances and spacings along a ray.

    Deterministic midpoint placement ``t_k = near + (k - 0.5) delta`` by
    default; pass ``rng`` for the seeded stratified mode (one uniform draw
    per interval), used only for parity experiments.
    """
    n = cfg.samples_per_ray
    delta = cfg.delta
    if rng is None:
        offsets = np.full(n, 0.5)
    else:
        offsets = rng.uniform(0.0, 1.0, size=n)
    ts = cfg.near + (np.arange(n) + offsets) * delta
    return ts, np.full(n, delta)


def opacity_along_ray(blob: Blob, sharpness: float, ray: Ray, cfg: SamplingConfig) -> float:
    """Scalar reference implementation of the front-to-back accumulation."""
    if not blob.active:
        return 0.0
    ts, deltas = sample_ray(ray, cfg)
    optical = 0.0
    opacity = 0.0
    for t, delta in zip(ts, deltas):
        point = ray.origin + t * ray.direction
        dist = mahalanobis_sq(point, blob.center, blob.euler, blob.aspect, sharpness)
        sig = sigmoid(blob.scale - dist)
        opacity += math.exp(-optical) * (1.0 - math.exp(-sig * delta))
        optical += sig * delta
    return opacity


def _as_resolution(resolution) -> tuple[int, int]:
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    h, w = int(resolution[0]), int(resolution[1])
    if h < 1 or w < 1:
        raise InvalidArgument(f"resolution must be >= 1, got {h}x{w}")
    return h, w


def render_camera(camera: Camera, resolution) -> Camera:
    """Camera resampled to the rendering resolution (same field of view)."""
    h, w = _as_resolution(resolution)
    if (camera.height, camera.width) == (h, w):
        return camera
    return replace(camera, width=w, height=h)


def opacity_map(blob: Blob, sharpness: float, camera: Camera, resolution, cfg: SamplingConfig) -> np.ndarray:
    """(H, W) opacity map of one blob under ``camera`` at ``resolution``."""
    h, w = _as_resolution(resolution)
    if not blob.active:
        return np.zeros((h, w))
    origin, dirs = ray_grid(render_camera(camera, (h, w)))
    rot = rotation_from_euler(blob.euler)
    inv_ca = 1.0 / (sharpness * blob.aspect)
    return _accel.opacity_kernel(
        origin, dirs, rot, blob.center, inv_ca,
        blob.scale, cfg.near, cfg.delta, cfg.samples_per_ray,
    )


def feature_map(opacity: np.ndarray, feature) -> np.ndarray:
    """Rank-1 per-pixel feature map ``O(x) * f``; shape (H, W, d)."""
    feature = np.asarray(feature, dtype=np.float64)
    return opacity[:, :, None] * feature[None, None, :]


def downsample_2x(grid: np.ndarray) -> np.ndarray:
    """2x2 area-average pooling of an (H, W) map."""
    h, w = grid.shape
    if h % 2 or w % 2:
        raise IndivisibleResolution(f"cannot halve {h}x{w}")
    return grid.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def opacity_pyramid(base: np.ndarray, low_levels: int) -> list[np.ndarray]:
    """Hierarchy [base, base/2, ..., base/2^low_levels], largest first.

    The level above ``base`` is produced by the learned upsampler, not here.
    """
    h, w = base.shape
    if low_levels < 0:
        raise InvalidArgument(f"low_levels must be >= 0, got {low_levels}")
    factor = 2 ** low_levels
    if h % factor or w % factor:
        raise IndivisibleResolution(f"{h}x{w} not divisible by 2^{low_levels}")
    levels = [base]
    for _ in range(low_levels):
        levels.append(downsample_2x(levels[-1]))
    return levels
