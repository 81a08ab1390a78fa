"""Command-line interface, exercised in-process through main()."""
from __future__ import annotations

import logging
import re

import numpy as np
import pytest
import yaml

import phasect
from phasect.cli import main
from phasect.io import read_csv

from conftest import small_experiment_config


@pytest.fixture(scope="module")
def small_yaml(tmp_path_factory):
    """The fast experiment written out as a config file for the CLI."""
    path = tmp_path_factory.mktemp("cfg") / "small.yaml"
    path.write_text(yaml.safe_dump(small_experiment_config().as_dict()))
    return str(path)


def run(*argv: str) -> int:
    return main(list(argv))


class TestParsing:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("--help")
        assert excinfo.value.code == 0
        assert "COMMAND" in capsys.readouterr().out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("--version")
        assert excinfo.value.code == 0
        assert f"phasect {phasect.__version__}" in capsys.readouterr().out

    def test_unknown_command_exits_one(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("frobnicate")
        assert excinfo.value.code == 1

    def test_missing_command_exits_one(self):
        with pytest.raises(SystemExit) as excinfo:
            run()
        assert excinfo.value.code == 1


class TestConfigErrors:
    def test_missing_config_file_exits_two(self, tmp_path, capsys):
        missing = tmp_path / "nope.yaml"
        assert run("phantom", "--config", str(missing)) == 2
        err = capsys.readouterr().err
        assert "configuration error" in err
        assert "nope.yaml" in err

    def test_bad_override_exits_two(self, tmp_path, capsys):
        code = run("phantom", "--set", "noise.nope=1",
                   "--output-dir", str(tmp_path))
        assert code == 2
        assert "nope" in capsys.readouterr().err

    def test_bad_value_exits_two(self, tmp_path, capsys):
        code = run("phantom", "--set", "noise.epsilon=2.0",
                   "--output-dir", str(tmp_path))
        assert code == 2


class TestCommands:
    def test_phantom_writes_image_files(self, small_yaml, tmp_path):
        assert run("phantom", "--config", small_yaml,
                   "--output-dir", str(tmp_path)) == 0
        for suffix in (".pgm", ".f64", ".hdr"):
            assert (tmp_path / f"phantom{suffix}").exists()

    def test_output_dir_from_environment(self, small_yaml, tmp_path,
                                         monkeypatch):
        outdir = tmp_path / "env_out"
        monkeypatch.setenv("PHASECT_OUTPUT_DIR", str(outdir))
        assert run("phantom", "--config", small_yaml) == 0
        assert (outdir / "phantom.pgm").exists()

    def test_stage_chain(self, small_yaml, tmp_path):
        out = str(tmp_path)
        assert run("project", "--config", small_yaml, "--output-dir", out) == 0
        assert run("split", "--config", small_yaml, "--output-dir", out) == 0
        assert run("invert", "--config", small_yaml, "--output-dir", out) == 0
        assert run("denoise", "--config", small_yaml, "--output-dir", out) == 0
        assert run("reconstruct", "--config", small_yaml,
                   "--output-dir", out) == 0
        for name in ("clean.npz", "split.npz", "inverted.npz",
                     "denoised.npz", "recon_denoised.pgm"):
            assert (tmp_path / name).exists(), name

    def test_seed_flag_changes_split_data(self, small_yaml, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run("project", "--config", small_yaml,
                       "--output-dir", str(d)) == 0
        assert run("split", "--config", small_yaml, "--output-dir", str(a),
                   "--seed", "1") == 0
        assert run("split", "--config", small_yaml, "--output-dir", str(b),
                   "--seed", "2") == 0
        with np.load(a / "split.npz") as fa, np.load(b / "split.npz") as fb:
            assert np.any(fa["data"] != fb["data"])

    def test_denoise_rejects_infinite_photons(self, small_yaml, tmp_path,
                                              capsys):
        out = str(tmp_path)
        assert run("project", "--config", small_yaml, "--output-dir", out) == 0
        assert run("split", "--config", small_yaml, "--output-dir", out,
                   "--no-noise") == 0
        assert run("invert", "--config", small_yaml, "--output-dir", out) == 0
        code = run("denoise", "--config", small_yaml, "--output-dir", out,
                   "--set", "noise.photons=.inf")
        assert code == 3
        assert "positive" in capsys.readouterr().err

    def test_pipeline_writes_metrics_and_images(self, small_yaml, tmp_path):
        assert run("pipeline", "--config", small_yaml,
                   "--output-dir", str(tmp_path)) == 0
        header, rows = read_csv(tmp_path / "metrics.csv")
        assert header == ["pipeline", "snr", "rmse", "iterations",
                          "runtime_ms"]
        assert [r[0] for r in rows] == ["direct", "inverted", "denoised"]
        for name in ("phantom", "recon_direct", "recon_inverted",
                     "recon_denoised", "residual_direct",
                     "residual_inverted", "residual_denoised"):
            assert (tmp_path / f"{name}.pgm").exists(), name
            assert (tmp_path / f"{name}.f64").exists(), name

    def test_pipeline_save_intermediates(self, small_yaml, tmp_path):
        assert run("pipeline", "--config", small_yaml,
                   "--output-dir", str(tmp_path),
                   "--save-intermediates") == 0
        for name in ("direct_split", "inverted_inverted",
                     "denoised_denoised"):
            assert (tmp_path / f"{name}.npz").exists(), name

    def test_sweep_with_shorthand_override(self, small_yaml, tmp_path):
        assert run("sweep", "--config", small_yaml,
                   "--output-dir", str(tmp_path),
                   "--set", "splitting=[20, 80]") == 0
        header, rows = read_csv(tmp_path / "sweep.csv")
        assert header == ["delta_s_nm", "snr", "rmse", "iterations",
                          "runtime_ms"]
        assert [r[0] for r in rows] == ["20", "80"]

    def test_sweep_all_failures_exits_three(self, small_yaml, tmp_path,
                                            capsys):
        code = run("sweep", "--config", small_yaml,
                   "--output-dir", str(tmp_path),
                   "--set", "splitting=[1e9]")
        assert code == 3
        assert "all sweep entries failed" in capsys.readouterr().err


class TestLogging:
    def test_startup_banner(self, small_yaml, tmp_path, caplog):
        with caplog.at_level(logging.INFO, logger="phasect.cli"):
            assert run("phantom", "--config", small_yaml,
                       "--output-dir", str(tmp_path)) == 0
        banner = next(m for m in caplog.messages if m.startswith("phasect "))
        assert phasect.__version__ in banner
        assert "backend=" in banner
        assert re.search(r"sha256=[0-9a-f]{64}", banner)
        assert "seed=1234" in banner
