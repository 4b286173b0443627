"""Command-line entry point: sample, render, edit, fit, gradcheck, serve.

Exit codes: 0 success, 2 validation/usage error, 1 internal error or a
failed gradient check. Diagnostics go to stderr as one JSON object per
line.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import _accel
from .camera import make_camera
from .errors import VALIDATION_ERRORS, BlobfieldError
from .pipeline import RENDER_MODES, render_bytes
from .render import SamplingConfig, default_sampling
from .scene import (
    DEFAULT_BLOB_COUNT,
    DEFAULT_FEATURE_DIM,
    DEFAULT_STYLE_DIM,
    EditOp,
    load_scene,
    sample_scene,
    save_scene,
)

GRADCHECK_TOLERANCE = 1e-4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _diagnostic(kind: str, message: str, **extra):
    doc = {"error": kind, "message": message}
    doc.update(extra)
    print(json.dumps(doc), file=sys.stderr)


def _add_camera_flags(parser, res_default=256):
    parser.add_argument("--yaw", type=float, default=0.0)
    parser.add_argument("--pitch", type=float, default=0.0)
    parser.add_argument("--radius", type=float, default=3.0)
    parser.add_argument("--focal", type=float, default=2.5)
    parser.add_argument("--res", type=int, default=res_default)


def _camera_from_args(args, res=None):
    res = res if res is not None else args.res
    return make_camera(yaw=args.yaw, pitch=args.pitch, radius=args.radius,
                       focal=args.focal, width=res, height=res)


def _sampling_from_args(args, camera):
    if args.near is not None or args.far is not None:
        near = args.near if args.near is not None else camera.radius - 1.0
        far = args.far if args.far is not None else camera.radius + 1.0
        return SamplingConfig(near, far, args.samples)
    return default_sampling(camera, args.samples)


def _read_scene(path: str):
    with open(path, "rb") as fh:
        return load_scene(fh.read())


def _write_output(data: bytes, path: str | None):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def build_parser() -> _Parser:
    parser = _Parser(prog="blobfield")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write a deterministic random scene")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--blobs", type=int, default=DEFAULT_BLOB_COUNT)
    p.add_argument("--feature-dim", type=int, default=DEFAULT_FEATURE_DIM)
    p.add_argument("--style-dim", type=int, default=DEFAULT_STYLE_DIM)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("render", help="render a scene to PNG or BG3D")
    p.add_argument("--scene", required=True)
    _add_camera_flags(p)
    p.add_argument("--mode", choices=RENDER_MODES, default="layout")
    p.add_argument("--near", type=float, default=None)
    p.add_argument("--far", type=float, default=None)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("edit", help="apply one edit op to a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--op", required=True, help="path to an EditOp JSON file")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("fit", help="fit blob geometry to target weight maps")
    p.add_argument("--init", required=True)
    p.add_argument("--target", required=True, help="BG3D file with a 'weights' tensor")
    _add_camera_flags(p)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--mask", default="center",
                   help="comma-separated subset of center,scale,aspect,euler")
    p.add_argument("--near", type=float, default=None)
    p.add_argument("--far", type=float, default=None)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--depth", default=None, help="BG3D file with a 'depth' tensor")
    p.add_argument("--depth-weight", type=float, default=0.0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("gradcheck", help="verify analytic gradients against finite differences")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--res", type=int, default=32)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("serve", help="run the HTTP editing service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--blobs", type=int, default=DEFAULT_BLOB_COUNT)

    return parser


def _cmd_sample(args) -> int:
    scene = sample_scene(args.seed, args.blobs, args.feature_dim, args.style_dim)
    _write_output(save_scene(scene), args.output)
    return 0


def _cmd_render(args) -> int:
    if args.threads is not None:
        _accel.set_threads(args.threads)
    scene = _read_scene(args.scene)
    camera = _camera_from_args(args)
    cfg = _sampling_from_args(args, camera)
    data, _ = render_bytes(scene, camera, args.res, args.mode, cfg)
    _write_output(data, args.output)
    return 0


def _cmd_edit(args) -> int:
    from .edits import apply_edit
    from .errors import MalformedDocument

    scene = _read_scene(args.scene)
    with open(args.op, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid edit JSON: {exc}") from None
    edited = apply_edit(scene, EditOp.from_json(doc))
    _write_output(save_scene(edited), args.output)
    return 0


def _cmd_fit(args) -> int:
    from . import bg3d
    from .errors import ShapeMismatch
    from .fit import FitConfig, fit_scene

    if args.threads is not None:
        _accel.set_threads(args.threads)
    initial = _read_scene(args.init)
    with open(args.target, "rb") as fh:
        tensors = bg3d.read_tensors(fh.read())
    if "weights" not in tensors:
        raise ShapeMismatch("target file has no 'weights' tensor")
    target = tensors["weights"].astype(np.float64)
    if target.ndim != 3:
        raise ShapeMismatch(f"'weights' tensor must be (M+1, H, W), got {target.shape}")
    h, w = target.shape[1:]
    camera = _camera_from_args(args, res=max(h, w))
    from .render import render_camera

    camera = render_camera(camera, (h, w))
    sampling = _sampling_from_args(args, camera)
    depth_maps = None
    if args.depth is not None:
        with open(args.depth, "rb") as fh:
            depth_tensors = bg3d.read_tensors(fh.read())
        if "depth" not in depth_tensors:
            raise ShapeMismatch("depth file has no 'depth' tensor")
        depth_maps = [depth_tensors["depth"].astype(np.float64)]
    cfg = FitConfig(
        learning_rate=args.lr,
        steps=args.steps,
        mask=tuple(args.mask.split(",")),
        depth_weight=args.depth_weight,
    )
    report = fit_scene(initial, [target], [camera], cfg, sampling=sampling,
                       depth_maps=depth_maps)
    _write_output(report.to_json().encode() + b"\n", args.output)
    return 0


def _cmd_gradcheck(args) -> int:
    from .gradcheck import run_gradcheck

    if args.threads is not None:
        _accel.set_threads(args.threads)
    report = run_gradcheck(seed=args.seed, trials=args.trials,
                           resolution=args.res, step=args.step)
    print(json.dumps({
        "trials": report.trials,
        "checked_params": report.checked,
        "max_rel_err": report.max_rel_err,
        "worst": report.worst,
        "tolerance": GRADCHECK_TOLERANCE,
        "backend": _accel.backend_name(),
    }))
    return 0 if report.max_rel_err < GRADCHECK_TOLERANCE else 1


def _cmd_serve(args) -> int:
    from .service import run_service

    run_service(host=args.host, port=args.port, seed=args.seed, blob_count=args.blobs)
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "render": _cmd_render,
    "edit": _cmd_edit,
    "fit": _cmd_fit,
    "gradcheck": _cmd_gradcheck,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _diagnostic("UsageError", str(exc))
        return 2
    try:
        return _COMMANDS[args.command](args)
    except VALIDATION_ERRORS as exc:
        extra = {"path": exc.path} if hasattr(exc, "path") else {}
        _diagnostic(type(exc).__name__, str(exc), **extra)
        return 2
    except OSError as exc:
        _diagnostic("IOError", str(exc))
        return 2
    except BlobfieldError as exc:
        _diagnostic(type(exc).__name__, str(exc))
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        _diagnostic("InternalError", f"{type(exc).__name__}: {exc}")
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
