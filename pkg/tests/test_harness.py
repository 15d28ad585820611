import configparser
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from sqfock import cli
from sqfock.errors import ConfigError, StepSizeError, TrackingError
from sqfock.harness import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    load_config,
    load_preset,
    run_experiment,
)
from sqfock.harness.bundle import ResultBundle, Table


def small_fig1(**overrides) -> ExperimentConfig:
    values = dict(g_min=0.01, g_max=0.03, g_count=3, fast=True)
    values.update(overrides)
    return replace(load_preset("fig1"), **values)


class TestConfig:
    def test_presets_load(self):
        for name in EXPERIMENT_NAMES:
            cfg = load_preset(name)
            assert cfg.name == name

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            load_preset("fig99")

    def test_minimal_config(self, tmp_path):
        path = tmp_path / "mini.ini"
        path.write_text("[experiment]\nname = fig3\n")
        cfg = load_config(path)
        assert cfg.name == "fig3"
        assert cfg.r == 0.9  # preset default

    def test_missing_name(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[physics]\nr = 0.9\n")
        with pytest.raises(ConfigError, match="name"):
            load_config(path)

    def test_unknown_key_named(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[experiment]\nname = fig3\n\n[physics]\nfrobnicate = 1\n")
        with pytest.raises(ConfigError, match="frobnicate"):
            load_config(path)

    def test_bad_value_named(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[experiment]\nname = fig3\n\n[physics]\ng = not-a-number\n")
        with pytest.raises(ConfigError, match="g"):
            load_config(path)

    def test_omega_c_modes(self, tmp_path):
        for text, expected in [("auto-analytic", "auto-analytic"), ("0.34", 0.34)]:
            path = tmp_path / "c.ini"
            path.write_text(f"[experiment]\nname = fig3\n\n[physics]\nomega_c = {text}\n")
            assert load_config(path).omega_c == expected


class TestBundleFormat:
    def test_csv_significant_digits(self, tmp_path):
        table = Table(["x", "y"], [(1 / 3, 2), (1.5e-11, 3)])
        bundle = ResultBundle(name="demo", tables={"t": table})
        out = bundle.write(tmp_path)
        text = (out / "t.csv").read_text()
        assert text.splitlines()[0] == "x,y"
        assert "0.333333333333" in text
        assert "1.5e-11" in text

    def test_metadata_always_written_on_failure(self, tmp_path):
        cfg = small_fig1(g_count=0)  # run_fig1 rejects the empty scan
        with pytest.raises(ConfigError):
            run_experiment(cfg, out_root=tmp_path)
        meta = configparser.ConfigParser()
        meta.optionxform = str
        meta.read(tmp_path / "fig1" / "metadata.txt")
        assert meta["outcome"]["status"] == "failed"
        assert "empty g scan" in meta["outcome"]["error"]

    def test_metadata_records_numerics_and_convergence(self, tmp_path):
        cfg = small_fig1(fast=False)
        run_experiment(cfg, out_root=tmp_path)
        meta = configparser.ConfigParser()
        meta.optionxform = str
        meta.read(tmp_path / "fig1" / "metadata.txt")
        assert meta["config_numerics"]["n_max"] == "40"
        assert meta["config_numerics"]["dt"] == "0.02"
        assert "gap_shift_nmax+10" in meta["convergence"]
        assert "pass" in meta["convergence"]["gap_shift_nmax+10"]

    def test_fast_mode_marked(self, tmp_path):
        run_experiment(small_fig1(), out_root=tmp_path)
        meta = configparser.ConfigParser()
        meta.optionxform = str
        meta.read(tmp_path / "fig1" / "metadata.txt")
        assert meta["convergence"]["skipped"] == "fast mode"

    def test_bit_identical_reruns(self, tmp_path):
        cfg = small_fig1()
        first = run_experiment(cfg, out_root=tmp_path / "a")
        second = run_experiment(cfg, out_root=tmp_path / "b")
        csv_a = (tmp_path / "a" / "fig1" / "splitting.csv").read_bytes()
        csv_b = (tmp_path / "b" / "fig1" / "splitting.csv").read_bytes()
        assert csv_a == csv_b


class TestCli:
    def test_presets_verb(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out
        for name in EXPERIMENT_NAMES:
            assert name in out

    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "ok.ini"
        path.write_text("[experiment]\nname = fig3\n")
        assert cli.main(["validate", str(path)]) == 0

    def test_validate_config_error(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[experiment]\nname = fig3\n\n[numerics]\nn_max = 2\n")
        assert cli.main(["validate", str(path)]) == 2

    def test_unknown_experiment_exit_code(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[experiment]\nname = fig42\n")
        assert cli.main(["run", str(path)]) == 2

    def test_run_small_scan(self, tmp_path, capsys):
        path = tmp_path / "small.ini"
        path.write_text(
            "[experiment]\nname = fig1\n\n[scan]\ng_min = 0.01\ng_max = 0.03\ng_count = 3\n"
            "\n[numerics]\nfast = true\n"
        )
        code = cli.main(["run", str(path), "--out", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "fig1" / "splitting.csv").exists()
        assert (tmp_path / "out" / "fig1" / "metadata.txt").exists()

    def test_cli_overrides_applied(self, tmp_path):
        path = tmp_path / "small.ini"
        path.write_text(
            "[experiment]\nname = fig1\n\n[scan]\ng_min = 0.01\ng_max = 0.03\ng_count = 3\n"
        )
        code = cli.main(["run", str(path), "--out", str(tmp_path / "out"), "--nmax", "44", "--fast"])
        assert code == 0
        meta = configparser.ConfigParser()
        meta.optionxform = str
        meta.read(tmp_path / "out" / "fig1" / "metadata.txt")
        assert meta["config_numerics"]["n_max"] == "44"
        assert meta["convergence"]["skipped"] == "fast mode"

    def test_outdir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SQFOCK_OUTDIR", str(tmp_path / "envout"))
        path = tmp_path / "small.ini"
        path.write_text(
            "[experiment]\nname = fig1\n\n[scan]\ng_min = 0.01\ng_max = 0.03\ng_count = 3\n"
            "\n[numerics]\nfast = true\n"
        )
        assert cli.main(["run", str(path)]) == 0
        assert (tmp_path / "envout" / "fig1" / "splitting.csv").exists()

    @pytest.mark.parametrize(
        "exc,code",
        [(TrackingError("x"), 4), (StepSizeError("x"), 3), (ConfigError("x"), 2)],
    )
    def test_exit_code_mapping(self, tmp_path, monkeypatch, exc, code):
        def boom(cfg, bundle):
            raise exc

        monkeypatch.setitem(cli.run_experiment.__globals__["RECIPES"], "fig1", boom)
        path = tmp_path / "small.ini"
        path.write_text("[experiment]\nname = fig1\n")
        assert cli.main(["run", str(path), "--out", str(tmp_path)]) == code


class TestResolvedResonance:
    def test_fixed_value_recorded(self, tmp_path):
        cfg = replace(load_preset("fig3"), omega_c=0.3338494543097809, trace_points=400,
                      duration_factor=1.3, fast=True)
        bundle = run_experiment(cfg, out_root=tmp_path)
        assert bundle.metadata["resonance"]["method"] == "fixed"

    def test_analytic_mode_recorded(self, tmp_path):
        cfg = replace(load_preset("fig3"), trace_points=400, duration_factor=1.3, fast=True)
        bundle = run_experiment(cfg, out_root=tmp_path)
        assert bundle.metadata["resonance"]["method"] == "auto-analytic"
        wc = float(bundle.metadata["resonance"]["omega_c"])
        assert abs(wc - 0.33384865763238136) < 1e-12
