import json

import numpy as np
import pytest
from click.testing import CliRunner
from PIL import Image

from sidu_xai import (
    FixationSet,
    RobustnessReport,
    build_reference_cnn,
    explain_sidu,
)
from sidu_xai.cli import load_image, main


@pytest.fixture
def runner():
    return CliRunner()


def _write_png(path, rng, bright_quadrant=False):
    arr = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
    if bright_quadrant:
        arr = (arr * 0.2).astype(np.uint8)
        arr[:16, :16] = rng.integers(200, 256, size=(16, 16, 3), dtype=np.uint8)
    Image.fromarray(arr).save(path, format="PNG")
    return path


def _write_fixations(image_path, points):
    fx = FixationSet(width=32, height=32, points=points, image=image_path.name)
    fx_path = image_path.with_suffix(".fixations.json")
    fx_path.write_text(json.dumps(fx.to_json()))
    return fx_path


class TestExplain:
    def test_writes_heatmap_and_overlay(self, runner, tmp_path, rng):
        img = _write_png(tmp_path / "cat.png", rng)
        out = tmp_path / "out"
        result = runner.invoke(main, ["explain", str(img), "--out", str(out), "--seed", "7"])
        assert result.exit_code == 0, result.output
        assert "predicted_class=" in result.output
        assert (out / "cat_heatmap.stf").exists()
        with Image.open(out / "cat_overlay.png") as overlay:
            assert overlay.size == (32, 32)

    def test_repeat_run_is_byte_identical(self, runner, tmp_path, rng):
        img = _write_png(tmp_path / "cat.png", rng)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            result = runner.invoke(main, ["explain", str(img), "--out", str(out), "--seed", "7"])
            assert result.exit_code == 0, result.output
        for name in ("cat_heatmap.stf", "cat_overlay.png"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_missing_image_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["explain", str(tmp_path / "nope.png")])
        assert result.exit_code == 2

    def test_non_png_rejected(self, runner, tmp_path, rng):
        bad = tmp_path / "photo.png"
        arr = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        Image.fromarray(arr).save(bad, format="JPEG")
        result = runner.invoke(main, ["explain", str(bad), "--out", str(tmp_path / "o")])
        assert result.exit_code == 2
        assert "PNG" in result.output

    def test_malformed_config_exits_2(self, runner, tmp_path, rng):
        img = _write_png(tmp_path / "cat.png", rng)
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{broken")
        result = runner.invoke(main, ["explain", str(img), "--config", str(cfg)])
        assert result.exit_code == 2


class TestEvalCausal:
    def _dataset(self, tmp_path, rng, n=2):
        data = tmp_path / "data"
        data.mkdir()
        for i in range(n):
            _write_png(data / f"img{i}.png", rng)
        return data

    def _config(self, tmp_path, steps=10):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"metrics": {"steps": steps}}))
        return cfg

    def test_outputs_per_image_curves_and_summary(self, runner, tmp_path, rng):
        data = self._dataset(tmp_path, rng)
        out = tmp_path / "out"
        result = runner.invoke(
            main,
            [
                "eval-causal",
                "--dataset",
                str(data),
                "--out",
                str(out),
                "--seed",
                "3",
                "--config",
                str(self._config(tmp_path)),
            ],
        )
        assert result.exit_code == 0, result.output
        for i in range(2):
            assert (out / f"img{i}_sidu_insertion.csv").exists()
            assert (out / f"img{i}_sidu_deletion.csv").exists()
        summary = (out / "causal_summary.csv").read_text().splitlines()
        assert summary[0] == "method,mean_insertion_auc,mean_deletion_auc"
        assert summary[1].startswith("sidu,")

    def test_repeat_run_is_byte_identical(self, runner, tmp_path, rng):
        data = self._dataset(tmp_path, rng, n=1)
        cfg = self._config(tmp_path)
        outs = (tmp_path / "a", tmp_path / "b")
        for out in outs:
            result = runner.invoke(
                main,
                ["eval-causal", "--dataset", str(data), "--out", str(out), "--seed", "3", "--config", str(cfg)],
            )
            assert result.exit_code == 0, result.output
        for path in sorted(outs[0].iterdir()):
            assert path.read_bytes() == (outs[1] / path.name).read_bytes()

    def test_empty_dataset_exits_2(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, ["eval-causal", "--dataset", str(empty), "--out", str(tmp_path / "o")])
        assert result.exit_code == 2


class TestEvalFixation:
    def test_positive_control_auc_high(self, runner, tmp_path, rng):
        data = tmp_path / "data"
        data.mkdir()
        img_path = _write_png(data / "img.png", rng)
        # place the fixations exactly on the method's own top-saliency pixels
        adapter = build_reference_cnn(seed=3)
        image = load_image(img_path, adapter.capabilities.input_dims)
        heat = explain_sidu(adapter, image).heatmap
        top = np.argsort(-heat.ravel(), kind="stable")[:50]
        _write_fixations(img_path, [("s", int(i % 32), int(i // 32)) for i in top])
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["eval-fixation", "--dataset", str(data), "--out", str(out), "--seed", "3"]
        )
        assert result.exit_code == 0, result.output
        mean = self._mean_row(out / "fixation_sidu.csv")
        assert mean["auc"] > 0.9

    def test_chance_control_auc_near_half(self, runner, tmp_path, rng):
        data = tmp_path / "data"
        data.mkdir()
        img_path = _write_png(data / "img.png", rng)
        fix_rng = np.random.default_rng(2024)
        points = [
            ("s", int(fix_rng.integers(0, 32)), int(fix_rng.integers(0, 32)))
            for _ in range(500)
        ]
        _write_fixations(img_path, points)
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["eval-fixation", "--dataset", str(data), "--out", str(out), "--seed", "3"]
        )
        assert result.exit_code == 0, result.output
        mean = self._mean_row(out / "fixation_sidu.csv")
        assert abs(mean["auc"] - 0.5) <= 0.1

    def test_missing_fixation_file_exits_2(self, runner, tmp_path, rng):
        data = tmp_path / "data"
        data.mkdir()
        _write_png(data / "img.png", rng)
        result = runner.invoke(
            main, ["eval-fixation", "--dataset", str(data), "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 2

    @staticmethod
    def _mean_row(csv_path):
        lines = csv_path.read_text().splitlines()
        header = lines[0].split(",")
        mean_line = next(line for line in lines if line.startswith("mean,"))
        values = mean_line.split(",")
        return {k: float(v) for k, v in zip(header[1:], values[1:])}


class TestAttack:
    def _dataset(self, tmp_path, rng):
        data = tmp_path / "data"
        data.mkdir()
        img_path = _write_png(data / "img.png", rng)
        _write_fixations(img_path, [("s", 4, 4), ("s", 20, 11), ("s", 30, 28)])
        return data

    def test_outputs_and_perturbation_bound(self, runner, tmp_path, rng):
        data = self._dataset(tmp_path, rng)
        out = tmp_path / "out"
        result = runner.invoke(
            main,
            [
                "attack",
                "--dataset",
                str(data),
                "--out",
                str(out),
                "--seed",
                "3",
                "--epsilon",
                "0.0",
                "--epsilon",
                "0.1",
            ],
        )
        assert result.exit_code == 0, result.output
        with Image.open(data / "img.png") as f:
            clean = np.asarray(f, dtype=np.int64)
        with Image.open(out / "img_eps0.0.png") as f:
            eps0 = np.asarray(f, dtype=np.int64)
        with Image.open(out / "img_eps0.1.png") as f:
            eps1 = np.asarray(f, dtype=np.int64)
        # epsilon 0 reproduces the input exactly; epsilon 0.1 moves each
        # 8-bit value by at most round(0.1 * 255) + 1
        assert np.array_equal(eps0, clean)
        assert np.max(np.abs(eps1 - clean)) <= 26
        for name in (
            "fixation_robustness.csv",
            "fixation_robustness.json",
            "drift_robustness.csv",
            "drift_robustness.json",
        ):
            assert (out / name).exists()
        fix = RobustnessReport.from_csv(out / "fixation_robustness.csv")
        assert sorted(r.epsilon for r in fix.records) == [0.0, 0.1]

    def test_file_model_cannot_attack(self, runner, tmp_path, rng):
        data = self._dataset(tmp_path, rng)
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"_meta": {"input_dims": [32, 32, 3], "num_classes": 2}}))
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": {"type": "file", "manifest": str(manifest)}}))
        result = runner.invoke(
            main,
            ["attack", "--dataset", str(data), "--out", str(tmp_path / "o"), "--config", str(cfg)],
        )
        assert result.exit_code == 2
        assert "gradient" in result.output


class TestSelftest:
    def test_all_oracles_pass(self, runner):
        result = runner.invoke(main, ["selftest"])
        assert result.exit_code == 0, result.output
        assert "FAIL" not in result.output
        assert "oracles passed" in result.output
