"""Object-level scene edits as pure transformations.

Every edit touches only its target blob(s); untargeted blobs are shared
with the input scene, so they stay bit-identical by construction.
"""

from __future__ import annotations

import numpy as np
from dataclasses import replace

from .camera import Camera, camera_basis, centroid_depth
from .errors import IndexOutOfRange, InvariantViolation
from .scene import Blob, EditOp, SceneLayout

MOVE_PAST_MARGIN = 0.05


def _check_index(scene: SceneLayout, index: int, name: str = "target") -> int:
    if not (0 <= index < scene.blob_count):
        raise IndexOutOfRange(f"{name} {index} out of range for {scene.blob_count} blobs")
    return index


def _payload(op: EditOp, length: int) -> np.ndarray:
    if len(op.payload) != length:
        raise InvariantViolation(
            "payload", f"{op.kind} expects {length} values, got {len(op.payload)}")
    return np.asarray(op.payload, dtype=np.float64)


def apply_edit(scene: SceneLayout, op: EditOp) -> SceneLayout:
    """Apply one edit; returns a new scene, the input is untouched."""
    i = _check_index(scene, op.target)
    blob = scene.blobs[i]

    if op.kind == "Move":
        delta = _payload(op, 3)
        return scene.with_blob(i, replace(blob, center=np.clip(blob.center + delta, 0.0, 1.0)))
    if op.kind == "Remove":
        _payload(op, 0)
        return scene.with_blob(i, replace(blob, active=False))
    if op.kind == "Restore":
        _payload(op, 0)
        return scene.with_blob(i, replace(blob, active=True))
    if op.kind == "Resize":
        delta = _payload(op, 1)
        return scene.with_blob(i, replace(blob, scale=blob.scale + float(delta[0])))
    if op.kind == "Reshape":
        aspect = _payload(op, 3)
        for k, a in enumerate(aspect):
            if not (0.0 < a <= 1.0):
                raise InvariantViolation(f"payload[{k}]", f"aspect must be in (0, 1], got {a}")
        return scene.with_blob(i, replace(blob, aspect=aspect))
    if op.kind == "Rotate":
        delta = _payload(op, 3)
        return scene.with_blob(i, replace(blob, euler=blob.euler + delta))
    if op.kind == "Restyle":
        style = _payload(op, scene.style_dim)
        return scene.with_blob(i, replace(blob, style=style))
    if op.kind == "Duplicate":
        offset = _payload(op, 3)
        copy = replace(blob, center=np.clip(blob.center + offset, 0.0, 1.0))
        return scene.with_appended(copy)
    if op.kind == "Swap":
        if op.target2 is None:
            raise InvariantViolation("target2", "Swap requires a second blob index")
        j = _check_index(scene, op.target2, "target2")
        _payload(op, 0)
        other = scene.blobs[j]
        swapped_i = replace(blob, feature=other.feature, style=other.style)
        swapped_j = replace(other, feature=blob.feature, style=blob.style)
        return scene.with_blob(i, swapped_i).with_blob(j, swapped_j)
    raise InvariantViolation("kind", f"unknown edit kind {op.kind!r}")


def move_past(scene: SceneLayout, i: int, j: int, camera: Camera) -> SceneLayout:
    """Translate blob i along the camera forward axis to just in front of j.

    After the move (clamping aside) blob i's centroid depth is
    ``MOVE_PAST_MARGIN`` less than blob j's, so the depth sort places i
    nearer the camera.
    """
    _check_index(scene, i)
    _check_index(scene, j, "j")
    if i == j:
        raise IndexOutOfRange("move_past needs two distinct blobs")
    _, _, forward = camera_basis(camera)
    depth_i = centroid_depth(camera, scene.blobs[i].center)
    depth_j = centroid_depth(camera, scene.blobs[j].center)
    advance = depth_j - MOVE_PAST_MARGIN - depth_i
    return apply_edit(scene, EditOp(kind="Move", target=i, payload=tuple(advance * forward)))
