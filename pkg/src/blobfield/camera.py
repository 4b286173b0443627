"""Pinhole camera on a look-at orbit around the scene center.

Conventions (normative for the whole package and its file formats):

* scene center is (0.5, 0.5, 0.5), the middle of the unit cube;
* camera position = center + radius * (cos(pitch)sin(yaw), sin(pitch), cos(pitch)cos(yaw));
* camera frame: x right, y up, z forward (toward the scene center);
* pixel centers sit at half-integer offsets and y grows downward in image space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BehindCamera, InvalidArgument, OutOfBounds

SCENE_CENTER = np.array([0.5, 0.5, 0.5])
SCENE_CENTER.setflags(write=False)

DEFAULT_FOCAL = 2.5
DEFAULT_RADIUS = 3.0


@dataclass(frozen=True)
class Camera:
    yaw: float
    pitch: float
    radius: float
    focal: float
    width: int
    height: int


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray  # unit length


def make_camera(
    yaw: float = 0.0,
    pitch: float = 0.0,
    radius: float = DEFAULT_RADIUS,
    focal: float = DEFAULT_FOCAL,
    width: int = 256,
    height: int = 256,
) -> Camera:
    if not (radius > 0.0):
        raise InvalidArgument(f"radius must be > 0, got {radius}")
    if not (focal > 0.0):
        raise InvalidArgument(f"focal must be > 0, got {focal}")
    if abs(pitch) >= math.pi / 2:
        raise InvalidArgument(f"|pitch| must be < pi/2, got {pitch}")
    if width < 1 or height < 1:
        raise InvalidArgument(f"image size must be >= 1, got {width}x{height}")
    if not all(math.isfinite(v) for v in (yaw, pitch, radius, focal)):
        raise InvalidArgument("camera parameters must be finite")
    return Camera(float(yaw), float(pitch), float(radius), float(focal), int(width), int(height))


def camera_position(camera: Camera) -> np.ndarray:
    cp, sp = math.cos(camera.pitch), math.sin(camera.pitch)
    cy, sy = math.cos(camera.yaw), math.sin(camera.yaw)
    return SCENE_CENTER + camera.radius * np.array([cp * sy, sp, cp * cy])


def camera_basis(camera: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(right, up, forward) world-space unit vectors.

    forward points from the camera at the scene center; up is world +Y
    re-orthogonalized against forward.
    """
    position = camera_position(camera)
    forward = SCENE_CENTER - position
    forward = forward / np.linalg.norm(forward)
    world_up = np.array([0.0, 1.0, 0.0])
    right = np.cross(forward, world_up)
    right = right / np.linalg.norm(right)
    up = np.cross(right, forward)
    up = up / np.linalg.norm(up)
    return right, up, forward


@lru_cache(maxsize=16)
def _ray_grid_cached(camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    right, up, forward = camera_basis(camera)
    w, h = camera.width, camera.height
    xs = (np.arange(w) + 0.5 - w / 2.0) / (camera.focal * w / 2.0)
    ys = -(np.arange(h) + 0.5 - h / 2.0) / (camera.focal * h / 2.0)
    dirs = (
        xs[None, :, None] * right[None, None, :]
        + ys[:, None, None] * up[None, None, :]
        + forward[None, None, :]
    )
    dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
    origin = camera_position(camera)
    origin.setflags(write=False)
    dirs.setflags(write=False)
    return origin, dirs


def ray_grid(camera: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Shared ray origin and an (H, W, 3) grid of unit ray directions."""
    return _ray_grid_cached(camera)


def ray_for_pixel(camera: Camera, px: int, py: int) -> Ray:
    """Ray through the center of pixel (px, py)."""
    if not (0 <= px < camera.width and 0 <= py < camera.height):
        raise OutOfBounds(f"pixel ({px}, {py}) outside {camera.width}x{camera.height}")
    origin, dirs = ray_grid(camera)
    return Ray(origin=origin, direction=dirs[py, px])


def centroid_depth(camera: Camera, point) -> float:
    """Camera-frame z of ``point``; positive in front of the camera."""
    _, _, forward = camera_basis(camera)
    return float(forward @ (np.asarray(point, dtype=np.float64) - camera_position(camera)))


def project(camera: Camera, point) -> tuple[float, float]:
    """Continuous pixel coordinates (u, v) of a world point.

    A point on the ray of pixel (px, py) projects to (px + 0.5, py + 0.5).
    """
    right, up, forward = camera_basis(camera)
    delta = np.asarray(point, dtype=np.float64) - camera_position(camera)
    x, y, z = float(right @ delta), float(up @ delta), float(forward @ delta)
    if z <= 0.0:
        raise BehindCamera(f"point has camera-space depth {z} <= 0")
    u = camera.width / 2.0 + camera.focal * (camera.width / 2.0) * (x / z)
    v = camera.height / 2.0 - camera.focal * (camera.height / 2.0) * (y / z)
    return u, v


def camera_to_json(camera: Camera) -> dict:
    return {
        "yaw": camera.yaw,
        "pitch": camera.pitch,
        "radius": camera.radius,
        "focal": camera.focal,
        "width": camera.width,
        "height": camera.height,
    }


def camera_from_json(doc) -> Camera:
    from .errors import SchemaViolation

    if not isinstance(doc, dict):
        raise SchemaViolation("camera", "expected an object")
    allowed = {"yaw", "pitch", "radius", "focal", "width", "height"}
    for key in doc:
        if key not in allowed:
            raise SchemaViolation(f"camera.{key}", "unknown key")
    def num(key, default=None):
        if key not in doc:
            if default is None:
                raise SchemaViolation(f"camera.{key}", "missing key")
            return default
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaViolation(f"camera.{key}", "expected a number")
        return v

    return make_camera(
        yaw=float(num("yaw", 0.0)),
        pitch=float(num("pitch", 0.0)),
        radius=float(num("radius", DEFAULT_RADIUS)),
        focal=float(num("focal", DEFAULT_FOCAL)),
        width=int(num("width", 256)),
        height=int(num("height", 256)),
    )
