"""Seeded gradient-verification harness behind ``blobfield gradcheck``.

Each trial draws a random scene and camera, builds a random linear
objective over the composited feature grid, and compares the analytic
gradient of every geometric parameter against central finite differences.
Scenes whose blobs nearly tie in centroid depth are redrawn, since the
composite is only piecewise smooth across sort order changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import make_camera
from .gradients import fd_check, grad_composite
from .pipeline import render_feature_grid
from .render import default_sampling
from .scene import Blob, SceneLayout

SORT_TIE_GAP = 1e-3
_FEATURE_DIM = 4
_STYLE_DIM = 2


def _random_scene(rng: np.random.Generator, blob_count: int) -> SceneLayout:
    # aspect capped below 1 so +step perturbations stay inside (0, 1]
    blobs = tuple(
        Blob(
            center=rng.uniform(0.3, 0.7, 3),
            scale=rng.uniform(2.0, 5.0),
            aspect=rng.uniform(0.3, 0.95, 3),
            euler=rng.uniform(-np.pi / 4, np.pi / 4, 3),
            feature=rng.standard_normal(_FEATURE_DIM),
            style=rng.standard_normal(_STYLE_DIM),
        )
        for _ in range(blob_count)
    )
    return SceneLayout(blobs=blobs, background_feature=rng.standard_normal(_FEATURE_DIM),
                       background_style=rng.standard_normal(_STYLE_DIM))


def _min_depth_gap(scene: SceneLayout, camera) -> float:
    from .camera import centroid_depth

    depths = sorted(centroid_depth(camera, b.center) for b in scene.blobs)
    if len(depths) < 2:
        return np.inf
    return min(b - a for a, b in zip(depths, depths[1:]))


@dataclass(frozen=True)
class GradcheckReport:
    trials: int
    checked: int
    max_rel_err: float
    worst: str


def run_gradcheck(seed: int = 0, trials: int = 100, resolution: int = 32,
                  step: float = 1e-5) -> GradcheckReport:
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_name = "none"
    checked = 0
    for trial in range(trials):
        blob_count = 1 + trial % 4
        camera = make_camera(
            yaw=rng.uniform(-np.pi, np.pi),
            pitch=rng.uniform(-0.4, 0.4),
            radius=3.0,
            width=resolution,
            height=resolution,
        )
        scene = _random_scene(rng, blob_count)
        while _min_depth_gap(scene, camera) < SORT_TIE_GAP:
            scene = _random_scene(rng, blob_count)
        cfg = default_sampling(camera)
        upstream = rng.standard_normal((resolution, resolution, _FEATURE_DIM))

        def objective(s: SceneLayout) -> float:
            grid = render_feature_grid(s, camera, resolution, cfg)
            return float(np.sum(upstream * grid))

        geom, _, _ = grad_composite(scene, camera, resolution, cfg, upstream)
        report = fd_check(objective, geom, scene, step=step)
        checked += report.checked
        if report.max_rel_err > worst:
            worst = report.max_rel_err
            worst_name = f"trial {trial}: {report.worst_param}"
    return GradcheckReport(trials=trials, checked=checked,
                           max_rel_err=worst, worst=worst_name)
