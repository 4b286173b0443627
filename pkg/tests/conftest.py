import numpy as np
import pytest

from blobfield.camera import make_camera
from blobfield.render import default_sampling
from blobfield.scene import Blob, SceneLayout


@pytest.fixture
def front_camera():
    return make_camera(yaw=0.0, pitch=0.0, radius=3.0, focal=2.5, width=32, height=32)


def make_blob(center=(0.5, 0.5, 0.5), scale=4.0, aspect=(1.0, 1.0, 1.0),
              euler=(0.0, 0.0, 0.0), feature=(1.0, 0.0), style=(0.0, 1.0),
              active=True):
    return Blob(center=center, scale=scale, aspect=aspect, euler=euler,
                feature=feature, style=style, active=active)


def make_scene(blobs, sharpness=0.02):
    return SceneLayout(blobs=tuple(blobs), sharpness=sharpness)


@pytest.fixture
def single_blob_scene():
    return make_scene([make_blob()])


def sampling_for(camera, samples=32):
    return default_sampling(camera, samples)


def tie_free(scene, camera, gap=1e-3):
    """True when active centroid depths are pairwise separated by > gap."""
    from blobfield.camera import centroid_depth

    depths = sorted(centroid_depth(camera, b.center)
                    for b in scene.blobs if b.active)
    return all(b - a > gap for a, b in zip(depths, depths[1:]))
