import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lightlayers import datagen
from lightlayers.cli import build_parser, main
from lightlayers.image import ImageRGB, gamma_decode
from lightlayers.model import compose
from lightlayers.layerfiles import load_layers
from lightlayers.pfm import read_pfm, write_pfm
from lightlayers.pngio import read_png
from lightlayers.envgen import smooth_envmap

HELP_DIR = Path(__file__).parent / "data" / "help"
SUBCOMMANDS = (
    "gen-data", "compose", "compose-dir", "split-env",
    "prefilter", "upsample", "eval", "inspect",
)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_ds")
    cfg = datagen.DatasetConfig(
        count=2, seed=77, resolution=16, out_dir=str(out), directional=True,
        env_count=1, occ_samples=64, prefilter_width=8, prefilter_height=4,
    )
    records = datagen.generate_dataset(cfg)
    return cfg, records


class TestHelpGolden:
    def test_main_help_matches_golden(self):
        assert build_parser().format_help() == (HELP_DIR / "main.txt").read_text()

    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_subcommand_help_matches_golden(self, name):
        parser = build_parser()
        sub = parser._subparsers._group_actions[0].choices[name]
        assert sub.format_help() == (HELP_DIR / f"{name}.txt").read_text()

    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_every_flag_documented(self, name):
        parser = build_parser()
        sub = parser._subparsers._group_actions[0].choices[name]
        text = sub.format_help()
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in text


class TestExitCodes:
    def test_no_subcommand_is_usage_error(self, capsys):
        assert main([]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["inspect", "--bogus"]) == 1

    def test_missing_file_is_data_error(self, capsys):
        assert main(["inspect", "/nonexistent/file.pfm"]) == 2
        assert "error" in capsys.readouterr().err

    def test_gloss_without_exponent_is_usage_error(self, tmp_path, capsys):
        env = smooth_envmap(0, 16, 8)
        write_pfm(env.image, tmp_path / "e.pfm")
        code = main([
            "prefilter", "--env", str(tmp_path / "e.pfm"), "--kind", "gloss",
            "--out", str(tmp_path / "o.pfm"),
        ])
        assert code == 1

    def test_malformed_pfm_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.pfm"
        bad.write_bytes(b"JUNK\n")
        assert main(["inspect", str(bad)]) == 2


class TestComposeCommands:
    def test_compose_reproduces_record(self, dataset, tmp_path):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        out = tmp_path / "c.png"
        assert main(["compose", "--layers", stem, "--out", str(out)]) == 0
        stored = read_png(stem + ".composed.png")
        recomposed = read_png(out)
        assert np.abs(stored.data - recomposed.data).max() <= 1.0 / 255.0

    def test_compose_directional_close_to_plain(self, dataset, tmp_path):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        out_d = tmp_path / "cd.png"
        assert main(["compose-dir", "--layers", stem, "--out", str(out_d)]) == 0
        stored = read_png(stem + ".composed.png").data.astype(np.float64)
        directional = read_png(out_d).data.astype(np.float64)
        assert np.linalg.norm(directional - stored) <= 0.02 * np.linalg.norm(stored)

    def test_compose_to_pfm_applies_scale(self, dataset, tmp_path):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        out = tmp_path / "c.pfm"
        assert main(["compose", "--layers", stem, "--out", str(out), "--scale", "2.0"]) == 0
        layers = load_layers(stem)
        expected = compose(layers).data * np.float32(2.0)
        np.testing.assert_allclose(read_pfm(out).data, expected, rtol=1e-6)


class TestSplitAndPrefilter:
    def test_split_env_conserves_energy(self, tmp_path):
        env = smooth_envmap(1, 64, 32)
        env_path = tmp_path / "e.pfm"
        write_pfm(env.image, env_path)
        stem = tmp_path / "split"
        assert main(["split-env", "--env", str(env_path), "--out", str(stem)]) == 0
        parts = [read_pfm(f"{stem}.env{i}.pfm") for i in range(6)]
        total = sum(p.data.astype(np.float64) for p in parts)
        np.testing.assert_allclose(total, env.data, atol=1e-6)

    def test_prefilter_irradiance(self, tmp_path):
        env = ImageRGB.constant(64, 32, (0.5, 0.5, 0.5))
        write_pfm(env, tmp_path / "e.pfm")
        out = tmp_path / "irr.pfm"
        code = main([
            "prefilter", "--env", str(tmp_path / "e.pfm"), "--kind", "irr",
            "--out", str(out), "--width", "16", "--height", "8",
        ])
        assert code == 0
        data = read_pfm(out).data
        assert data.shape == (8, 16, 3)
        np.testing.assert_allclose(data, 0.5, atol=2e-3)

    def test_prefilter_gloss_constant_fixed_point(self, tmp_path):
        env = ImageRGB.constant(64, 32, (0.25, 0.25, 0.25))
        write_pfm(env, tmp_path / "e.pfm")
        out = tmp_path / "g.pfm"
        code = main([
            "prefilter", "--env", str(tmp_path / "e.pfm"), "--kind", "gloss",
            "--n", "50", "--out", str(out), "--width", "8", "--height", "4",
        ])
        assert code == 0
        np.testing.assert_allclose(read_pfm(out).data, 0.25, atol=1e-6)


class TestUpsample:
    def test_refined_layers_recompose_to_target(self, dataset, tmp_path):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        out_stem = tmp_path / "hd"
        hd_png = stem + ".composed.png"
        code = main([
            "upsample", "--layers", stem, "--hd", hd_png,
            "--out", str(out_stem), "--iterations", "10",
        ])
        assert code == 0
        refined = load_layers(out_stem)
        target = gamma_decode(read_png(hd_png))
        err = np.abs(compose(refined).data - target.data.astype(np.float32)).max()
        assert err < 1e-6


class TestEval:
    def test_single_pair_identity(self, dataset, tmp_path):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        report = tmp_path / "report.txt"
        code = main(["eval", "--pred", stem, "--gt", stem, "--report", str(report)])
        assert code == 0
        text = report.read_text()
        assert "dssim.albedo.mean=0" in text
        assert "count=1" in text

    def test_manifest_batch(self, dataset, tmp_path):
        cfg, _ = dataset
        report = tmp_path / "batch.txt"
        manifest = os.path.join(cfg.out_dir, "manifest.txt")
        code = main(["eval", "--manifest", manifest, "--report", str(report)])
        assert code == 0
        assert "count=2" in report.read_text()

    def test_eval_without_inputs_is_usage_error(self, tmp_path):
        assert main(["eval", "--report", str(tmp_path / "r.txt")]) == 1


class TestInspect:
    def test_prints_stats(self, dataset, capsys):
        cfg, records = dataset
        stem = os.path.join(cfg.out_dir, records[0].stem)
        assert main(["inspect", stem + ".occ.pfm", stem + ".composed.png"]) == 0
        out = capsys.readouterr().out
        assert "16x16" in out
        assert "channels=1" in out and "channels=3" in out
        assert "encoding=linear" in out and "encoding=gamma(2)" in out


def test_console_script_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "lightlayers.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "gen-data" in result.stdout

    result = subprocess.run(
        [sys.executable, "-m", "lightlayers.cli", "inspect", "/missing.pfm"],
        capture_output=True, text=True,
    )
    assert result.returncode == 2
