#!/usr/bin/env python3
"""Benchmark the numba-jitted hot kernels against the pure-numpy fallback.

Both implementations are imported directly (bypassing the env-flag
dispatch) and timed on the same inputs: per-blob opacity maps and the
upstream-contracted parameter gradient, across a few resolutions.

Usage: python benchmarks/benchmark_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from blobfield import _kernels_numpy
from blobfield.camera import make_camera, ray_grid
from blobfield.geometry import rotation_derivatives, rotation_from_euler
from blobfield.render import default_sampling
from blobfield.scene import sample_scene

try:
    from blobfield import _kernels_numba

    HAVE_NUMBA = True
except ImportError:
    _kernels_numba = None
    HAVE_NUMBA = False


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    scene = sample_scene(7, 1, 4, 4)
    blob = scene.blobs[0]
    rot = rotation_from_euler(blob.euler)
    drot = rotation_derivatives(blob.euler)
    inv_ca = 1.0 / (scene.sharpness * blob.aspect)

    print(f"{'kernel':<10} {'resolution':<12} {'numpy':>10} "
          f"{'numba':>10} {'speedup':>9}")
    for res in (32, 64, 128, 256):
        camera = make_camera(width=res, height=res)
        cfg = default_sampling(camera)
        origin, dirs = ray_grid(camera)
        upstream = np.random.default_rng(0).standard_normal((res, res))

        opacity_args = (origin, dirs, rot, blob.center, inv_ca, blob.scale,
                        cfg.near, cfg.delta, cfg.samples_per_ray)
        grad_args = (origin, dirs, rot, drot, blob.center, inv_ca, blob.aspect,
                     blob.scale, cfg.near, cfg.delta, cfg.samples_per_ray, upstream)

        rows = [("opacity", opacity_args, "opacity_kernel"),
                ("gradient", grad_args, "grad_opacity_kernel")]
        for label, call_args, name in rows:
            numpy_time = best_of(args.repeats, getattr(_kernels_numpy, name), *call_args)
            if HAVE_NUMBA:
                jitted = getattr(_kernels_numba, name)
                jitted(*call_args)  # compile outside the timed region
                numba_time = best_of(args.repeats, jitted, *call_args)
                speedup = f"{numpy_time / numba_time:8.1f}x"
                numba_text = f"{numba_time * 1e3:8.2f}ms"
            else:
                numba_text, speedup = "n/a", "n/a"
            print(f"{label:<10} {res}x{res:<8} {numpy_time * 1e3:8.2f}ms "
                  f"{numba_text:>10} {speedup:>9}")


if __name__ == "__main__":
    main()
