"""Inverse rendering: recover blob geometry from target weight maps.

Plain fixed-step gradient descent so the loop doubles as an end-to-end
oracle for the analytic gradients; no momentum, no line search. Targets
are composite-weight stacks, the quantity the renderer defines exactly,
with the background map last.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .camera import Camera
from .errors import InvalidArgument, NonFiniteObjective, ShapeMismatch
from .gradients import (
    GEOMETRY_FIELDS,
    grad_depth_loss,
    grad_weight_maps,
    depth_loss,
)
from .pipeline import render_weight_stack
from .render import SamplingConfig
from .scene import Blob, SceneLayout


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float
    steps: int
    mask: tuple[str, ...] = ("center",)
    depth_weight: float = 0.0

    def __post_init__(self):
        if not (self.learning_rate > 0.0):
            raise InvalidArgument(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.steps < 1:
            raise InvalidArgument(f"steps must be >= 1, got {self.steps}")
        if self.depth_weight < 0.0:
            raise InvalidArgument(f"depth_weight must be >= 0, got {self.depth_weight}")
        bad = set(self.mask) - set(GEOMETRY_FIELDS)
        if bad or not self.mask:
            raise InvalidArgument(f"mask must name fields from {GEOMETRY_FIELDS}, got {self.mask}")


@dataclass(frozen=True)
class FitReport:
    loss_trace: tuple[float, ...]  # length steps + 1
    final_scene: SceneLayout
    center_errors: tuple[float, ...] | None = None

    def to_json(self) -> str:
        doc = {
            "loss_trace": list(self.loss_trace),
            "final_loss": self.loss_trace[-1],
            "center_errors": None if self.center_errors is None else list(self.center_errors),
        }
        return json.dumps(doc)


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _weight_mse(rendered: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    # per-map mean squared error summed over maps: normalizing by pixel
    # count alone keeps gradient magnitudes independent of resolution
    # without diluting the weaker depth-direction signal by the map count
    diff = rendered - target
    per_map_pixels = diff.shape[1] * diff.shape[2]
    return float(np.sum(diff * diff) / per_map_pixels), (2.0 / per_map_pixels) * diff


def _apply_step(scene: SceneLayout, grads, learning_rate: float, mask) -> SceneLayout:
    blobs = list(scene.blobs)
    for i, blob in enumerate(blobs):
        if not blob.active:
            continue
        g = grads[i]
        kwargs = {}
        if "center" in mask:
            kwargs["center"] = np.clip(blob.center - learning_rate * g.d_center, 0.0, 1.0)
        if "scale" in mask:
            kwargs["scale"] = blob.scale - learning_rate * g.d_scale
        if "aspect" in mask:
            kwargs["aspect"] = np.clip(blob.aspect - learning_rate * g.d_aspect, 1e-6, 1.0)
        if "euler" in mask:
            kwargs["euler"] = blob.euler - learning_rate * g.d_euler
        if kwargs:
            blobs[i] = replace(blob, **kwargs)
    return replace(scene, blobs=tuple(blobs))


def fit_scene(initial: SceneLayout, targets, cameras, cfg: FitConfig,
              sampling: SamplingConfig | None = None, depth_maps=None,
              ground_truth: SceneLayout | None = None) -> FitReport:
    """Gradient-descent recovery of masked blob parameters.

    ``targets`` is one (M+1, H, W) weight stack per camera (background
    last); ``depth_maps`` (same cameras) activates the depth term scaled by
    ``cfg.depth_weight``. Deterministic for fixed inputs.
    """
    cameras = _as_list(cameras)
    targets = [np.asarray(t, dtype=np.float64) for t in _as_list(targets)]
    if len(cameras) != len(targets):
        raise ShapeMismatch(f"{len(targets)} targets for {len(cameras)} cameras")
    if depth_maps is not None:
        depth_maps = [np.asarray(d, dtype=np.float64) for d in _as_list(depth_maps)]
        if len(depth_maps) != len(cameras):
            raise ShapeMismatch(f"{len(depth_maps)} depth maps for {len(cameras)} cameras")
    expected = initial.blob_count + 1
    for camera, target in zip(cameras, targets):
        if target.ndim != 3 or target.shape[0] != expected:
            raise ShapeMismatch(f"target shape {target.shape}, expected ({expected}, H, W)")

    def evaluate(scene: SceneLayout, step: int):
        total = 0.0
        grads = _zero_grads(scene)
        for idx, camera in enumerate(cameras):
            h, w = targets[idx].shape[1:]
            sampling_cfg = sampling or _default_sampling(camera)
            stack = render_weight_stack(scene, camera, (h, w), sampling_cfg)
            loss, upstream = _weight_mse(stack, targets[idx])
            if not math.isfinite(loss):
                raise NonFiniteObjective(f"loss became non-finite at step {step}")
            total += loss
            cam_grads = grad_weight_maps(scene, _sized(camera, h, w), (h, w),
                                         sampling_cfg, upstream)
            for i in range(scene.blob_count):
                grads[i] = _add_grads(grads[i], cam_grads[i])
            if depth_maps is not None and cfg.depth_weight > 0.0:
                sized = _sized(camera, h, w)
                total += cfg.depth_weight * depth_loss(scene, sized, depth_maps[idx])
                d_centers = grad_depth_loss(scene, sized, depth_maps[idx])
                for i in range(scene.blob_count):
                    grads[i] = replace(
                        grads[i],
                        d_center=grads[i].d_center + cfg.depth_weight * d_centers[i])
        return total, grads

    scene = initial
    trace = []
    for step in range(cfg.steps):
        loss, grads = evaluate(scene, step)
        trace.append(loss)
        scene = _apply_step(scene, grads, cfg.learning_rate, cfg.mask)
    final_loss, _ = evaluate(scene, cfg.steps)
    trace.append(final_loss)

    center_errors = None
    if ground_truth is not None:
        center_errors = tuple(
            float(np.linalg.norm(scene.blobs[i].center - ground_truth.blobs[i].center))
            for i in range(scene.blob_count)
        )
    return FitReport(loss_trace=tuple(trace), final_scene=scene, center_errors=center_errors)


def _zero_grads(scene: SceneLayout):
    from .gradients import BlobParamGrad

    return [BlobParamGrad.zero() for _ in scene.blobs]


def _add_grads(a, b):
    return replace(
        a,
        d_center=a.d_center + b.d_center,
        d_scale=a.d_scale + b.d_scale,
        d_aspect=a.d_aspect + b.d_aspect,
        d_euler=a.d_euler + b.d_euler,
    )


def _default_sampling(camera: Camera) -> SamplingConfig:
    from .render import default_sampling

    return default_sampling(camera)


def _sized(camera: Camera, h: int, w: int) -> Camera:
    from .render import render_camera

    return render_camera(camera, (h, w))
