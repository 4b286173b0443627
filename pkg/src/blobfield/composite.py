"""Depth sorting and back-to-front compositing of per-blob opacity maps.

The weight of blob i at pixel p is ``O_i(p) * prod_{j in front}(1 - O_j(p))``
and the residual transmittance ``prod_all(1 - O_j)`` is assigned to the
scene background, so the weights partition unity at every pixel.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from .camera import Camera, centroid_depth
from .errors import DimensionMismatch, EmptyScene, PaletteTooShort, ResolutionMismatch
from .scene import SceneLayout


@dataclass(frozen=True)
class DepthOrder:
    """Active blob indices back to front, with their centroid depths."""

    order: tuple[int, ...]
    depths: tuple[float, ...]  # aligned with order; non-increasing


def depth_sort(scene: SceneLayout, camera: Camera) -> DepthOrder:
    """Sort active blobs by descending camera-space centroid depth.

    Ties keep ascending original index, so the permutation is a pure
    function of the scene and camera.
    """
    active = scene.active_indices()
    if not active:
        raise EmptyScene("no active blobs to sort")
    depths = {i: centroid_depth(camera, scene.blobs[i].center) for i in active}
    order = sorted(active, key=lambda i: (-depths[i], i))
    return DepthOrder(order=tuple(order), depths=tuple(depths[i] for i in order))


def _check_same_resolution(maps) -> tuple[int, int]:
    shape = maps[0].shape
    for m in maps[1:]:
        if m.shape != shape:
            raise ResolutionMismatch(f"opacity maps disagree: {m.shape} vs {shape}")
    return shape


def composite_weights(opacities) -> tuple[np.ndarray, np.ndarray]:
    """Per-blob weight maps and the background weight map.

    ``opacities`` must be in back-to-front order; the returned stack keeps
    that order. Sweeps front to back so occlusion products accumulate in a
    fixed order.
    """
    opacities = [np.asarray(o, dtype=np.float64) for o in opacities]
    if not opacities:
        raise EmptyScene("no opacity maps to composite")
    h, w = _check_same_resolution(opacities)
    m = len(opacities)
    weights = np.empty((m, h, w))
    transmittance = np.ones((h, w))
    for i in range(m - 1, -1, -1):
        weights[i] = opacities[i] * transmittance
        transmittance = transmittance * (1.0 - opacities[i])
    return weights, transmittance


def composite_features(weights: np.ndarray, background_weight: np.ndarray,
                       features, background_feature) -> np.ndarray:
    """Feature grid ``F(p) = sum_i w_i(p) f_i + w_bg(p) f_bg``; (H, W, d)."""
    features = np.asarray(features, dtype=np.float64)
    background_feature = np.asarray(background_feature, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != weights.shape[0]:
        raise DimensionMismatch(
            f"need one feature row per weight map, got {features.shape} for {weights.shape[0]} maps")
    if background_feature.shape != (features.shape[1],):
        raise DimensionMismatch(
            f"background feature length {background_feature.shape} != {features.shape[1]}")
    grid = np.einsum("ihw,id->hwd", weights, features)
    grid += background_weight[:, :, None] * background_feature[None, None, :]
    return grid


def style_grids(pyramids, styles, background_style) -> list[np.ndarray]:
    """Splat style vectors onto every pyramid level with the same weights.

    ``pyramids[i]`` is blob i's list of opacity maps (largest level first),
    in back-to-front blob order; level structure must match across blobs.
    """
    if not pyramids:
        raise EmptyScene("no opacity pyramids to splat")
    levels = len(pyramids[0])
    for p in pyramids:
        if len(p) != levels:
            raise ResolutionMismatch("blobs disagree on pyramid level count")
    grids = []
    for level in range(levels):
        weights, bg_weight = composite_weights([p[level] for p in pyramids])
        grids.append(composite_features(weights, bg_weight, styles, background_style))
    return grids


def layout_image(weights: np.ndarray, background_weight: np.ndarray,
                 palette, background_color) -> np.ndarray:
    """False-color (H, W, 3) visualization of the compositing weights."""
    palette = np.asarray(palette, dtype=np.float64)
    if palette.ndim != 2 or palette.shape[1] != 3:
        raise DimensionMismatch(f"palette must be (n, 3), got {palette.shape}")
    if palette.shape[0] < weights.shape[0]:
        raise PaletteTooShort(
            f"{palette.shape[0]} colors for {weights.shape[0]} blobs")
    background_color = np.asarray(background_color, dtype=np.float64)
    image = composite_features(weights, background_weight,
                               palette[: weights.shape[0]], background_color)
    return np.clip(image, 0.0, 1.0)


def default_palette(count: int) -> np.ndarray:
    """Deterministic per-index colors: golden-angle hue walk."""
    colors = np.empty((count, 3))
    for i in range(count):
        hue = (i * 0.61803398875) % 1.0
        colors[i] = colorsys.hsv_to_rgb(hue, 0.75, 0.95)
    return colors


DEFAULT_BACKGROUND_COLOR = np.array([0.12, 0.12, 0.12])
DEFAULT_BACKGROUND_COLOR.setflags(write=False)
