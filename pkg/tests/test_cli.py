import json
import subprocess
import sys

import numpy as np
import pytest

from blobfield.bg3d import read_tensors, write_tensors
from blobfield.camera import make_camera
from blobfield.cli import main
from blobfield.pipeline import render_bytes, render_weight_stack
from blobfield.render import default_sampling
from blobfield.scene import load_scene, sample_scene, save_scene


def run_cli(args):
    """Run in-process; returns (exit_code, captured bytes are file-based)."""
    return main(args)


def run_cli_subprocess(args):
    return subprocess.run([sys.executable, "-m", "blobfield.cli", *args],
                          capture_output=True)


class TestSample:
    def test_writes_deterministic_scene(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert run_cli(["sample", "--seed", "7", "--blobs", "10", "-o", str(out1)]) == 0
        assert run_cli(["sample", "--seed", "7", "--blobs", "10", "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        scene = load_scene(out1.read_bytes())
        assert scene.blob_count == 10
        assert scene == sample_scene(7, 10)

    def test_invalid_counts_exit_2(self, tmp_path):
        assert run_cli(["sample", "--seed", "1", "--blobs", "0",
                        "-o", str(tmp_path / "x.json")]) == 2

    def test_usage_error_exit_2(self):
        assert run_cli(["sample"]) == 2  # missing --seed
        assert run_cli(["explode"]) == 2


class TestRender:
    @pytest.fixture
    def scene_file(self, tmp_path):
        path = tmp_path / "scene.json"
        path.write_bytes(save_scene(sample_scene(7, 3, 4, 4)))
        return path

    def test_layout_byte_deterministic(self, scene_file, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        args = ["render", "--scene", str(scene_file), "--res", "32", "--mode", "layout"]
        assert run_cli(args + ["-o", str(a)]) == 0
        assert run_cli(args + ["-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_matches_library_bytes(self, scene_file, tmp_path):
        out = tmp_path / "r.png"
        assert run_cli(["render", "--scene", str(scene_file), "--yaw", "0.3",
                        "--pitch", "0.1", "--res", "24", "--mode", "layout",
                        "-o", str(out)]) == 0
        scene = load_scene(scene_file.read_bytes())
        camera = make_camera(yaw=0.3, pitch=0.1, radius=3.0, focal=2.5,
                             width=24, height=24)
        expected, _ = render_bytes(scene, camera, 24, "layout")
        assert out.read_bytes() == expected

    def test_weights_mode_tensor(self, scene_file, tmp_path):
        out = tmp_path / "w.bg3d"
        assert run_cli(["render", "--scene", str(scene_file), "--res", "16",
                        "--mode", "weights", "-o", str(out)]) == 0
        tensors = read_tensors(out.read_bytes())
        assert tensors["weights"].shape == (4, 16, 16)

    def test_missing_scene_file_exit_2(self, tmp_path):
        assert run_cli(["render", "--scene", str(tmp_path / "nope.json"),
                        "-o", str(tmp_path / "x.png")]) == 2

    def test_malformed_scene_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        assert run_cli(["render", "--scene", str(bad), "-o", str(tmp_path / "x.png")]) == 2


class TestEdit:
    def test_apply_move(self, tmp_path):
        scene_path = tmp_path / "scene.json"
        scene = sample_scene(3, 2, 4, 4)
        scene_path.write_bytes(save_scene(scene))
        op_path = tmp_path / "op.json"
        op_path.write_text(json.dumps({"kind": "Move", "target": 0,
                                       "payload": [0.1, 0.0, 0.0]}))
        out = tmp_path / "out.json"
        assert run_cli(["edit", "--scene", str(scene_path), "--op", str(op_path),
                        "-o", str(out)]) == 0
        edited = load_scene(out.read_bytes())
        assert edited.blobs[0].center[0] == min(scene.blobs[0].center[0] + 0.1, 1.0)

    def test_invalid_op_exit_2(self, tmp_path):
        scene_path = tmp_path / "scene.json"
        scene_path.write_bytes(save_scene(sample_scene(3, 2, 4, 4)))
        op_path = tmp_path / "op.json"
        op_path.write_text(json.dumps({"kind": "Move", "target": 5, "payload": [0, 0, 0]}))
        assert run_cli(["edit", "--scene", str(scene_path), "--op", str(op_path),
                        "-o", str(tmp_path / "o.json")]) == 2


class TestFit:
    def test_recovers_centers_small(self, tmp_path):
        camera = make_camera(radius=2.0, width=32, height=32)
        cfg = default_sampling(camera)
        truth = sample_scene(4, 2, 2, 2)
        target = render_weight_stack(truth, camera, 32, cfg)
        target_path = tmp_path / "target.bg3d"
        target_path.write_bytes(write_tensors({"weights": target}))
        from blobfield.gradients import perturb_blob_param

        init = truth
        for i in range(2):
            init = perturb_blob_param(init, i, "center", 0, 0.02)
        init_path = tmp_path / "init.json"
        init_path.write_bytes(save_scene(init))
        report_path = tmp_path / "report.json"
        assert run_cli(["fit", "--init", str(init_path), "--target", str(target_path),
                        "--radius", "2.0", "--steps", "40", "--lr", "0.5",
                        "-o", str(report_path)]) == 0
        report = json.loads(report_path.read_text())
        assert len(report["loss_trace"]) == 41
        assert report["final_loss"] < report["loss_trace"][0]

    def test_missing_weights_tensor_exit_2(self, tmp_path):
        init_path = tmp_path / "init.json"
        init_path.write_bytes(save_scene(sample_scene(4, 2, 2, 2)))
        bad = tmp_path / "bad.bg3d"
        bad.write_bytes(write_tensors({"other": np.zeros((1, 2, 2), dtype=np.float32)}))
        assert run_cli(["fit", "--init", str(init_path), "--target", str(bad),
                        "-o", str(tmp_path / "r.json")]) == 2


class TestGradcheck:
    def test_small_run_passes(self, capsys):
        assert run_cli(["gradcheck", "--seed", "1", "--trials", "4", "--res", "16"]) == 0
        out = capsys.readouterr().out
        doc = json.loads(out.strip().splitlines()[-1])
        assert doc["max_rel_err"] < 1e-4
        assert doc["trials"] == 4


class TestSubprocessContract:
    def test_stderr_machine_parsable_on_error(self, tmp_path):
        result = run_cli_subprocess(["render", "--scene", str(tmp_path / "missing.json"),
                                     "-o", str(tmp_path / "x.png")])
        assert result.returncode == 2
        lines = [l for l in result.stderr.decode().strip().splitlines() if l]
        doc = json.loads(lines[-1])
        assert "error" in doc and "message" in doc

    def test_sample_stdout(self):
        result = run_cli_subprocess(["sample", "--seed", "5", "--blobs", "2",
                                     "--feature-dim", "4", "--style-dim", "4"])
        assert result.returncode == 0
        scene = load_scene(result.stdout)
        assert scene == sample_scene(5, 2, 4, 4)
