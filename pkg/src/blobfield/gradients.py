"""Analytic derivatives of opacity maps, composites, and the depth loss.

Gradients are reverse-mode shaped: every entry point takes an upstream
cotangent so callers can compose objectives without re-rendering. The
depth-sort permutation is treated as locally constant, which makes the
composite piecewise smooth in blob parameters; verification excludes
sort-tie neighborhoods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _accel
from .camera import Camera, centroid_depth, project, ray_grid
from .composite import composite_weights, depth_sort
from .errors import (
    BehindCamera,
    NonFiniteObjective,
    OutOfImage,
    ShapeMismatch,
)
from .geometry import rotation_derivatives, rotation_from_euler
from .render import SamplingConfig, opacity_map, render_camera, _as_resolution
from .scene import Blob, SceneLayout

GEOMETRY_FIELDS = ("center", "scale", "aspect", "euler")


@dataclass(frozen=True)
class BlobParamGrad:
    """Gradient of a scalar objective w.r.t. one blob's geometric params."""

    d_center: np.ndarray
    d_scale: float
    d_aspect: np.ndarray
    d_euler: np.ndarray

    @classmethod
    def zero(cls) -> "BlobParamGrad":
        return cls(np.zeros(3), 0.0, np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "BlobParamGrad":
        return cls(vec[0:3].copy(), float(vec[3]), vec[4:7].copy(), vec[7:10].copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.d_center, [self.d_scale], self.d_aspect, self.d_euler])


def grad_opacity_map(blob: Blob, sharpness: float, camera: Camera, resolution,
                     cfg: SamplingConfig, upstream: np.ndarray) -> BlobParamGrad:
    """Contract ``sum_p upstream(p) dO(p)/dtheta`` for one blob.

    Uses the telescoped opacity form: dO/dsigma_k = delta * exp(-sum_j
    sigma_j delta_j) for every k, then the logistic and Mahalanobis chain.
    """
    h, w = _as_resolution(resolution)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (h, w):
        raise ShapeMismatch(f"upstream {upstream.shape} != resolution {(h, w)}")
    if not blob.active:
        return BlobParamGrad.zero()
    origin, dirs = ray_grid(render_camera(camera, (h, w)))
    rot = rotation_from_euler(blob.euler)
    drot = rotation_derivatives(blob.euler)
    inv_ca = 1.0 / (sharpness * blob.aspect)
    per_pixel = _accel.grad_opacity_kernel(
        origin, dirs, rot, drot, blob.center, inv_ca, blob.aspect,
        blob.scale, cfg.near, cfg.delta, cfg.samples_per_ray, upstream,
    )
    return BlobParamGrad.from_vector(per_pixel.sum(axis=(0, 1)))


def _occlusion_cotangents(opacities: np.ndarray, u_blob: np.ndarray,
                          u_background: np.ndarray) -> np.ndarray:
    """d(objective)/d(O_m) for every map, given d(objective)/d(w).

    ``opacities``/``u_blob`` are (M, H, W) in back-to-front order. Uses
    prefix/suffix transmittance sweeps only; no division, so saturated
    opacities are safe.
    """
    m = opacities.shape[0]
    suffix = np.empty_like(opacities)  # prod of (1 - O_j) over j in front of m
    trans = np.ones(opacities.shape[1:])
    for i in range(m - 1, -1, -1):
        suffix[i] = trans
        trans = trans * (1.0 - opacities[i])
    cotangents = np.empty_like(opacities)
    prefix = np.ones(opacities.shape[1:])  # prod of (1 - O_j) behind m
    behind = np.zeros(opacities.shape[1:])  # sum_{i<m} u_i O_i prod_{i<j<m}(1-O_j)
    for i in range(m):
        cotangents[i] = suffix[i] * (u_blob[i] - behind - u_background * prefix)
        behind = (1.0 - opacities[i]) * behind + u_blob[i] * opacities[i]
        prefix = prefix * (1.0 - opacities[i])
    return cotangents


def grad_composite(scene: SceneLayout, camera: Camera, resolution,
                   cfg: SamplingConfig, upstream: np.ndarray):
    """Gradients of ``sum_p upstream(p,:) . F(p,:)`` through the composite.

    Returns (per-blob BlobParamGrad list, per-blob feature gradients (M, d),
    background feature gradient (d,)). Inactive blobs get exact zeros.
    """
    h, w = _as_resolution(resolution)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape[:2] != (h, w) or upstream.ndim != 3:
        raise ShapeMismatch(f"upstream {upstream.shape} != {(h, w, scene.feature_dim)}")
    if upstream.shape[2] != scene.feature_dim:
        raise ShapeMismatch(f"upstream channels {upstream.shape[2]} != feature_dim {scene.feature_dim}")

    order = depth_sort(scene, camera).order
    maps = np.stack([opacity_map(scene.blobs[i], scene.sharpness, camera, (h, w), cfg)
                     for i in order])
    weights, bg_weight = composite_weights(maps)

    u_blob = np.stack([upstream @ scene.blobs[i].feature for i in order])
    u_background = upstream @ scene.background_feature
    cotangents = _occlusion_cotangents(maps, u_blob, u_background)

    geom = [BlobParamGrad.zero() for _ in scene.blobs]
    d_features = np.zeros((scene.blob_count, scene.feature_dim))
    for pos, i in enumerate(order):
        geom[i] = grad_opacity_map(scene.blobs[i], scene.sharpness, camera,
                                   (h, w), cfg, cotangents[pos])
        d_features[i] = np.einsum("hw,hwd->d", weights[pos], upstream)
    d_background = np.einsum("hw,hwd->d", bg_weight, upstream)
    return geom, d_features, d_background


def grad_weight_maps(scene: SceneLayout, camera: Camera, resolution,
                     cfg: SamplingConfig, upstream_weights: np.ndarray):
    """Gradients of ``sum_p sum_i upstream[i](p) w_i(p)`` w.r.t. geometry.

    ``upstream_weights`` has shape (M+1, H, W): one cotangent map per blob
    in original index order plus the background map last. This is the
    composite gradient specialized to identity features, used by the
    inverse-rendering fitter.
    """
    h, w = _as_resolution(resolution)
    upstream_weights = np.asarray(upstream_weights, dtype=np.float64)
    if upstream_weights.shape != (scene.blob_count + 1, h, w):
        raise ShapeMismatch(
            f"upstream {upstream_weights.shape} != {(scene.blob_count + 1, h, w)}")
    order = depth_sort(scene, camera).order
    maps = np.stack([opacity_map(scene.blobs[i], scene.sharpness, camera, (h, w), cfg)
                     for i in order])
    u_blob = np.stack([upstream_weights[i] for i in order])
    cotangents = _occlusion_cotangents(maps, u_blob, upstream_weights[-1])
    geom = [BlobParamGrad.zero() for _ in scene.blobs]
    for pos, i in enumerate(order):
        geom[i] = grad_opacity_map(scene.blobs[i], scene.sharpness, camera,
                                   (h, w), cfg, cotangents[pos])
    return geom


def _centroid_pixel(camera: Camera, index: int, center: np.ndarray) -> tuple[int, int, float]:
    depth = centroid_depth(camera, center)
    if depth <= 0.0:
        raise BehindCamera(f"blobs[{index}] centroid behind the camera (depth {depth})")
    u, v = project(camera, center)
    if not (0.0 <= u < camera.width and 0.0 <= v < camera.height):
        raise OutOfImage(f"blobs[{index}] projects to ({u:.2f}, {v:.2f}) outside the image")
    return int(math.floor(u)), int(math.floor(v)), depth


def depth_loss(scene: SceneLayout, camera: Camera, depth_map: np.ndarray) -> float:
    """Mean squared gap between centroid depths and an external depth map.

    The depth map is sampled at the nearest pixel to each projected
    centroid; its resolution must match the camera image size.
    """
    depth_map = np.asarray(depth_map, dtype=np.float64)
    if depth_map.shape != (camera.height, camera.width):
        raise ShapeMismatch(
            f"depth map {depth_map.shape} != camera {(camera.height, camera.width)}")
    residuals = []
    for i in scene.active_indices():
        px, py, depth = _centroid_pixel(camera, i, scene.blobs[i].center)
        residuals.append(depth - depth_map[py, px])
    if not residuals:
        from .errors import EmptyScene

        raise EmptyScene("depth loss needs at least one active blob")
    residuals = np.asarray(residuals)
    return float(np.mean(residuals * residuals))


def grad_depth_loss(scene: SceneLayout, camera: Camera, depth_map: np.ndarray) -> np.ndarray:
    """(M, 3) gradient of ``depth_loss`` w.r.t. blob centers.

    The depth map is piecewise constant under nearest-pixel sampling, so
    gradient flows only through each centroid's camera-space depth.
    """
    depth_map = np.asarray(depth_map, dtype=np.float64)
    if depth_map.shape != (camera.height, camera.width):
        raise ShapeMismatch(
            f"depth map {depth_map.shape} != camera {(camera.height, camera.width)}")
    from .camera import camera_basis

    _, _, forward = camera_basis(camera)
    active = scene.active_indices()
    grads = np.zeros((scene.blob_count, 3))
    for i in active:
        px, py, depth = _centroid_pixel(camera, i, scene.blobs[i].center)
        grads[i] = (2.0 / len(active)) * (depth - depth_map[py, px]) * forward
    return grads


# --- finite-difference harness ---------------------------------------------


def perturb_blob_param(scene: SceneLayout, blob_index: int, field: str,
                       component: int, delta: float) -> SceneLayout:
    """New scene with one scalar geometric parameter shifted by ``delta``."""
    blob = scene.blobs[blob_index]
    if field == "scale":
        new = replace(blob, scale=blob.scale + delta)
    else:
        values = np.array(getattr(blob, field))
        values[component] += delta
        new = replace(blob, **{field: values})
    return scene.with_blob(blob_index, new)


def iter_geometry_params(scene: SceneLayout, mask=GEOMETRY_FIELDS):
    """Yield (blob_index, field, component) for free params of active blobs."""
    for i, blob in enumerate(scene.blobs):
        if not blob.active:
            continue
        for field in GEOMETRY_FIELDS:
            if field not in mask:
                continue
            for component in range(1 if field == "scale" else 3):
                yield i, field, component


def pick_gradient(grads: list[BlobParamGrad], blob_index: int, field: str, component: int) -> float:
    g = grads[blob_index]
    if field == "scale":
        return g.d_scale
    return float(getattr(g, "d_" + field)[component])


@dataclass(frozen=True)
class FdReport:
    max_rel_err: float
    worst_param: str
    checked: int


def fd_check(objective, analytic_grads, scene: SceneLayout, step: float = 1e-5,
             mask=GEOMETRY_FIELDS) -> FdReport:
    """Compare an analytic gradient against central finite differences.

    ``objective(scene) -> float``; ``analytic_grads`` is either a list of
    per-blob BlobParamGrad or a callable producing one. Relative error is
    ``|a - g| / max(|a|, |g|, 1e-8)`` per scalar parameter.
    """
    if step <= 0.0:
        from .errors import InvalidArgument

        raise InvalidArgument(f"step must be > 0, got {step}")
    if callable(analytic_grads):
        analytic_grads = analytic_grads(scene)
    worst = 0.0
    worst_name = "none"
    checked = 0
    for i, field, comp in iter_geometry_params(scene, mask):
        plus = objective(perturb_blob_param(scene, i, field, comp, +step))
        minus = objective(perturb_blob_param(scene, i, field, comp, -step))
        if not (math.isfinite(plus) and math.isfinite(minus)):
            raise NonFiniteObjective(f"objective not finite at blobs[{i}].{field}[{comp}]")
        numeric = (plus - minus) / (2.0 * step)
        analytic = pick_gradient(analytic_grads, i, field, comp)
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
        checked += 1
        if rel > worst:
            worst = rel
            worst_name = f"blobs[{i}].{field}[{comp}]"
    return FdReport(max_rel_err=worst, worst_param=worst_name, checked=checked)
