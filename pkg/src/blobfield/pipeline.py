"""Scene-level rendering entry points shared by the CLI and the service.

Everything here is a pure function of (scene, camera, settings), and the
encoded outputs are byte-deterministic, so the CLI and the HTTP service
produce identical bytes for identical inputs by construction.
"""

from __future__ import annotations

import numpy as np

from . import bg3d, png
from .camera import Camera
from .composite import (
    DEFAULT_BACKGROUND_COLOR,
    composite_features,
    composite_weights,
    default_palette,
    depth_sort,
    layout_image,
    style_grids,
)
from .errors import InvalidArgument
from .render import (
    SamplingConfig,
    _as_resolution,
    default_sampling,
    opacity_map,
    opacity_pyramid,
)
from .scene import SceneLayout
from .upsampler import UpsamplerParams, upsample_block

RENDER_MODES = ("layout", "weights", "features")


def sorted_opacity_maps(scene: SceneLayout, camera: Camera, resolution,
                        cfg: SamplingConfig):
    """(DepthOrder, (A, H, W) stack) for active blobs, back to front."""
    order = depth_sort(scene, camera)
    maps = np.stack([
        opacity_map(scene.blobs[i], scene.sharpness, camera, resolution, cfg)
        for i in order.order
    ])
    return order, maps


def render_weight_stack(scene: SceneLayout, camera: Camera, resolution,
                        cfg: SamplingConfig) -> np.ndarray:
    """(M+1, H, W) composite weights in original blob order, background last.

    Inactive blobs contribute all-zero maps.
    """
    h, w = _as_resolution(resolution)
    order, maps = sorted_opacity_maps(scene, camera, (h, w), cfg)
    weights, bg_weight = composite_weights(maps)
    stack = np.zeros((scene.blob_count + 1, h, w))
    for pos, i in enumerate(order.order):
        stack[i] = weights[pos]
    stack[-1] = bg_weight
    return stack


def render_feature_grid(scene: SceneLayout, camera: Camera, resolution,
                        cfg: SamplingConfig) -> np.ndarray:
    """(H, W, d_s) depth-composited feature grid."""
    order, maps = sorted_opacity_maps(scene, camera, resolution, cfg)
    weights, bg_weight = composite_weights(maps)
    features = np.stack([scene.blobs[i].feature for i in order.order])
    return composite_features(weights, bg_weight, features, scene.background_feature)


def render_layout(scene: SceneLayout, camera: Camera, resolution,
                  cfg: SamplingConfig) -> np.ndarray:
    """(H, W, 3) float layout visualization with the default palette."""
    h, w = _as_resolution(resolution)
    order, maps = sorted_opacity_maps(scene, camera, (h, w), cfg)
    weights, bg_weight = composite_weights(maps)
    palette = default_palette(scene.blob_count)
    colors = palette[list(order.order)]
    return layout_image(weights, bg_weight, colors, DEFAULT_BACKGROUND_COLOR)


def render_bytes(scene: SceneLayout, camera: Camera, resolution, mode: str,
                 cfg: SamplingConfig | None = None) -> tuple[bytes, str]:
    """Encode one render; returns (payload, content type)."""
    if mode not in RENDER_MODES:
        raise InvalidArgument(f"mode must be one of {RENDER_MODES}, got {mode!r}")
    cfg = cfg or default_sampling(camera)
    if mode == "layout":
        image = render_layout(scene, camera, resolution, cfg)
        return png.encode_png(png.quantize(image)), "image/png"
    if mode == "weights":
        stack = render_weight_stack(scene, camera, resolution, cfg)
        return bg3d.write_tensors({"weights": stack}), "application/octet-stream"
    grid = render_feature_grid(scene, camera, resolution, cfg)
    return bg3d.write_tensors({"features": grid}), "application/octet-stream"


def hierarchical_style_grids(scene: SceneLayout, camera: Camera,
                             cfg: SamplingConfig | None = None,
                             base_resolution: int = 128, low_levels: int = 3,
                             upsampler: UpsamplerParams | None = None) -> list[np.ndarray]:
    """Style grids at every pyramid level, largest first.

    Volume rendering happens once at ``base_resolution``; lower levels pool
    the base and, when ``upsampler`` is given, a learned 2x level is
    prepended on top (feature-modulated per blob).
    """
    cfg = cfg or default_sampling(camera)
    order, maps = sorted_opacity_maps(scene, camera, base_resolution, cfg)
    pyramids = [opacity_pyramid(m, low_levels) for m in maps]
    if upsampler is not None:
        for pos, i in enumerate(order.order):
            top = upsample_block(pyramids[pos][0], upsampler, scene.blobs[i].feature)
            pyramids[pos] = [top] + pyramids[pos]
    styles = np.stack([scene.blobs[i].style for i in order.order])
    return style_grids(pyramids, styles, scene.background_style)
